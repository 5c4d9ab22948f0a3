#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

namespace painstates {

using ordered_json = nlohmann::ordered_json;

/// Serializes `j` with insertion-ordered keys and every floating point number
/// printed via "%.17g" so artifacts are byte-stable and parse back exactly.
/// Non-finite numbers throw InvariantError.
void write_canonical_json(std::ostream& out, const ordered_json& j, int indent = 2);

/// write_canonical_json into a file, followed by a trailing newline.
void save_json(const std::string& path, const ordered_json& j);

ordered_json load_json(const std::string& path);

}  // namespace painstates
