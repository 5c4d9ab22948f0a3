#pragma once

#include <map>
#include <string>

#include "painstates/jsonio.hpp"

namespace painstates {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// SHA-256 of a file's bytes, lowercase hex.
std::string sha256_file(const std::string& path);

/// Per-stage provenance record: input/output hashes, the effective config,
/// and the seed. Contains no timestamps, thread counts, or absolute paths,
/// so identical runs produce identical manifests wherever they live.
struct RunManifest {
    std::string stage;
    std::string base_dir;  // files inside are keyed by their relative path
    std::map<std::string, std::string> inputs;   // relative path -> sha256
    std::map<std::string, std::string> outputs;  // relative path -> sha256
    ordered_json config;
    std::uint64_t seed = 0;

    void add_input(const std::string& path);
    void add_output(const std::string& path);
    void save(const std::string& path) const;
};

/// Rehashes every manifest input that resolves under base_dir; throws
/// DataError on a mismatch (tamper check).
void verify_manifest_inputs(const std::string& manifest_path, const std::string& base_dir);

}  // namespace painstates
