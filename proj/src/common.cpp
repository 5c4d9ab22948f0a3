#include "painstates/common.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>

namespace painstates {

Date::Date(int year, unsigned month, unsigned day) {
    std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                    std::chrono::day{day}};
    if (!ymd.ok()) throw ParseError("invalid calendar date");
    day_ = std::chrono::sys_days{ymd};
}

Date Date::parse(std::string_view iso) {
    int y = 0, consumed = 0;
    unsigned m = 0, d = 0;
    char sep1 = 0, sep2 = 0;
    std::string buf(iso);
    if (std::sscanf(buf.c_str(), "%d%c%u%c%u%n", &y, &sep1, &m, &sep2, &d, &consumed) != 5 ||
        sep1 != '-' || sep2 != '-' || std::size_t(consumed) != buf.size()) {
        throw ParseError("malformed date '" + buf + "' (expected YYYY-MM-DD)");
    }
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                    std::chrono::day{d}};
    if (!ymd.ok()) throw ParseError("invalid calendar date '" + buf + "'");
    return Date(std::chrono::sys_days{ymd});
}

std::string Date::to_string() const {
    std::chrono::year_month_day ymd{day_};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
}

DayTime parse_timestamp(std::string_view text) {
    if (text.size() < 19) throw ParseError("malformed timestamp '" + std::string(text) + "'");
    char sep = text[10];
    if (sep != 'T' && sep != ' ')
        throw ParseError("malformed timestamp '" + std::string(text) + "'");
    DayTime out;
    out.date = Date::parse(text.substr(0, 10));
    int h = 0, mi = 0, s = 0, consumed = 0;
    std::string rest(text.substr(11));
    if (std::sscanf(rest.c_str(), "%d:%d:%d%n", &h, &mi, &s, &consumed) != 3 ||
        std::size_t(consumed) != rest.size() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 ||
        s > 60) {
        throw ParseError("malformed time of day '" + std::string(text) + "'");
    }
    out.seconds_of_day = h * 3600 + mi * 60 + s;
    return out;
}

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
}

std::uint64_t Rng::next_u64() {
    std::uint64_t* s = state_;
    const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
}

double Rng::next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::next_index(std::uint64_t n) {
    if (n == 0) throw InvariantError("next_index(0)");
    // Rejection sampling keeps the draw unbiased.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % n;
}

double Rng::next_normal(double mean, double sd) {
    if (has_spare_) {
        has_spare_ = false;
        return mean + sd * spare_;
    }
    double u1, u2;
    do {
        u1 = next_double();
    } while (u1 <= 0.0);
    u2 = next_double();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double z0 = mag * std::cos(2.0 * M_PI * u2);
    spare_ = mag * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return mean + sd * z0;
}

int Rng::next_poisson(double lambda) {
    if (lambda < 0) throw InvariantError("negative Poisson rate");
    if (lambda == 0) return 0;
    const double limit = std::exp(-lambda);
    double p = 1.0;
    int k = 0;
    do {
        ++k;
        p *= next_double();
    } while (p > limit);
    return k - 1;
}

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed ^ (0xD6E8FEB86659FD93ULL * (stream + 1));
    std::uint64_t a = splitmix64(x);
    std::uint64_t b = splitmix64(x);
    return a ^ rotl(b, 32);
}

std::string fmt_double(double v) {
    if (!std::isfinite(v)) throw InvariantError("non-finite value in output");
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace painstates
