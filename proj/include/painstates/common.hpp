#pragma once

#include <chrono>
#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace painstates {

// Error taxonomy. The CLI maps these onto exit codes: input/config problems
// exit 2, broken internal invariants exit 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : Error {
    using Error::Error;
};
struct SchemaError : Error {
    using Error::Error;
};
struct RangeError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct DataError : Error {
    using Error::Error;
};
struct InvariantError : Error {
    using Error::Error;
};

/// Calendar date (no intra-day time). Backed by std::chrono::sys_days.
class Date {
public:
    Date() = default;
    explicit Date(std::chrono::sys_days d) : day_(d) {}
    Date(int year, unsigned month, unsigned day);

    // Parses "YYYY-MM-DD". Throws ParseError on malformed or invalid dates.
    static Date parse(std::string_view iso);

    std::string to_string() const;  // "YYYY-MM-DD"

    Date plus_days(int n) const { return Date(day_ + std::chrono::days{n}); }
    // Signed day difference (this - other).
    int days_since(const Date& other) const {
        return static_cast<int>((day_ - other.day_).count());
    }

    std::chrono::sys_days raw() const { return day_; }
    auto operator<=>(const Date&) const = default;

private:
    std::chrono::sys_days day_{};
};

/// Timestamp split into its calendar date and seconds past midnight.
struct DayTime {
    Date date;
    int seconds_of_day = 0;
};

// Parses "YYYY-MM-DDTHH:MM:SS" (a space also accepted as separator).
DayTime parse_timestamp(std::string_view text);

/// Deterministic PRNG: xoshiro256++ seeded through splitmix64. All stochastic
/// code in the toolkit draws from this so runs are reproducible across
/// platforms and thread counts (std:: distributions are implementation
/// defined and not used).
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    /// Uniform in [0, 1).
    double next_double();
    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t next_index(std::uint64_t n);
    /// Gaussian via Box-Muller (spare value cached).
    double next_normal(double mean = 0.0, double sd = 1.0);
    /// Poisson via Knuth's product method (small lambda only).
    int next_poisson(double lambda);

    /// Independent sub-stream seed for unit `stream` of a seeded run; used to
    /// give every restart/resample/permutation its own generator so parallel
    /// schedules cannot affect results.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

private:
    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Shortest decimal form of `v` printed with "%.17g"; round-trips exactly
/// through strtod. Non-finite values are rejected (they must never reach an
/// artifact).
std::string fmt_double(double v);

inline bool almost_equal(double a, double b, double tol = 1e-12) {
    return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace painstates
