#pragma once

#include <unistd.h>

#include <filesystem>
#include <sstream>
#include <string>

#include "painstates/common.hpp"
#include "painstates/ingest.hpp"
#include "painstates/matrix.hpp"

namespace painstates::testing {

inline QuestionRegistry six_category_registry() {
    return QuestionRegistry({
        {"pain_overall", Category::pain, 0, 10, Polarity::higher_is_worse},
        {"pain_leg", Category::pain, 0, 10, Polarity::higher_is_worse},
        {"pain_back", Category::pain, 0, 10, Polarity::higher_is_worse},
        {"mood", Category::mood, 0, 10, Polarity::higher_is_better},
        {"sleep_hours", Category::sleep, 0, 12, Polarity::higher_is_better},
        {"sleep_quality", Category::sleep, 0, 10, Polarity::higher_is_better},
        {"alertness", Category::alertness, 0, 10, Polarity::higher_is_better},
        {"med_opioid", Category::medication, 0, 10, Polarity::higher_is_worse},
        {"med_otc", Category::medication, 0, 10, Polarity::higher_is_worse},
        {"med_non_opioid", Category::medication, 0, 10, Polarity::higher_is_worse},
        {"activity_adl", Category::activity_adl, 0, 20, Polarity::higher_is_better},
        {"activity_interference", Category::activity_interference, 0, 10,
         Polarity::higher_is_worse},
    });
}

inline QuestionRegistry tiny_registry() {
    return QuestionRegistry({
        {"pain_overall", Category::pain, 0, 10, Polarity::higher_is_worse},
        {"mood", Category::mood, 0, 10, Polarity::higher_is_better},
    });
}

/// Gaussian blobs around the given centers.
inline Matrix blobs(const Matrix& centers, std::size_t per_blob, double sd, std::uint64_t seed,
                    std::vector<int>* labels = nullptr) {
    Rng rng(seed);
    Matrix X(per_blob * centers.rows(), centers.cols());
    for (std::size_t b = 0; b < centers.rows(); ++b) {
        for (std::size_t i = 0; i < per_blob; ++i) {
            const std::size_t row = b * per_blob + i;
            for (std::size_t j = 0; j < centers.cols(); ++j)
                X(row, j) = centers(b, j) + sd * rng.next_normal();
            if (labels) labels->push_back(int(b));
        }
    }
    return X;
}

/// Unique temporary directory, removed on destruction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("painstates_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string str() const { return path.string(); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace painstates::testing
