#include "painstates/csv.hpp"

#include <cmath>
#include <cstdlib>

namespace painstates::csv {

std::vector<std::string> split_line(const std::string& line, std::size_t line_number) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            if (!cur.empty())
                throw ParseError("line " + std::to_string(line_number) +
                                 ": stray quote inside unquoted field");
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted)
        throw ParseError("line " + std::to_string(line_number) + ": unterminated quoted field");
    out.push_back(std::move(cur));
    return out;
}

Reader::Reader(std::istream& in, const std::vector<std::string>& expected_header,
               std::string stream_name)
    : in_(in), name_(std::move(stream_name)) {
    std::string line;
    if (!std::getline(in_, line))
        throw ParseError(name_ + ": empty stream, header row expected");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    header_ = split_line(line, 1);
    if (!expected_header.empty() && header_ != expected_header) {
        std::string want;
        for (std::size_t i = 0; i < expected_header.size(); ++i)
            want += (i ? "," : "") + expected_header[i];
        throw SchemaError(name_ + ": unexpected header, want '" + want + "'");
    }
}

std::optional<Row> Reader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        Row row;
        row.line_number = line_;
        row.fields = split_line(line, line_);
        return row;
    }
    return std::nullopt;
}

std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << escape(fields[i]);
    }
    out << '\n';
}

double parse_number(const std::string& text, const std::string& stream_name,
                    std::size_t line_number) {
    if (text.empty())
        throw ParseError(stream_name + " line " + std::to_string(line_number) +
                         ": empty numeric field");
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    // Non-finite values would sail through range checks (NaN compares false).
    if (end != text.c_str() + text.size() || !std::isfinite(v))
        throw ParseError(stream_name + " line " + std::to_string(line_number) +
                         ": not a finite number: '" + text + "'");
    return v;
}

}  // namespace painstates::csv
