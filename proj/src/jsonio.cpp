#include "painstates/jsonio.hpp"

#include <fstream>

#include "painstates/common.hpp"

namespace painstates {

namespace {

void write_value(std::ostream& out, const ordered_json& j, int indent, int depth) {
    const std::string pad(std::size_t(indent) * (depth + 1), ' ');
    const std::string close_pad(std::size_t(indent) * depth, ' ');
    switch (j.type()) {
        case ordered_json::value_t::object: {
            if (j.empty()) {
                out << "{}";
                return;
            }
            out << "{\n";
            std::size_t i = 0;
            for (auto it = j.begin(); it != j.end(); ++it, ++i) {
                out << pad << ordered_json(it.key()).dump() << ": ";
                write_value(out, it.value(), indent, depth + 1);
                if (i + 1 < j.size()) out << ',';
                out << '\n';
            }
            out << close_pad << '}';
            return;
        }
        case ordered_json::value_t::array: {
            if (j.empty()) {
                out << "[]";
                return;
            }
            out << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                out << pad;
                write_value(out, j[i], indent, depth + 1);
                if (i + 1 < j.size()) out << ',';
                out << '\n';
            }
            out << close_pad << ']';
            return;
        }
        case ordered_json::value_t::number_float:
            out << fmt_double(j.get<double>());
            return;
        default:
            out << j.dump();
            return;
    }
}

}  // namespace

void write_canonical_json(std::ostream& out, const ordered_json& j, int indent) {
    write_value(out, j, indent, 0);
}

void save_json(const std::string& path, const ordered_json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    write_canonical_json(out, j);
    out << '\n';
    if (!out) throw Error("write failed: " + path);
}

ordered_json load_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

}  // namespace painstates
