#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "painstates/common.hpp"

namespace painstates {

/// Minimal RFC-4180 style CSV support: comma separator, double quotes for
/// fields containing comma/quote/newline. No embedded-newline fields on read.
namespace csv {

struct Row {
    std::size_t line_number = 0;  // 1-based, header is line 1
    std::vector<std::string> fields;
};

/// Splits one CSV line. Throws ParseError (with the given line number) on
/// unbalanced quotes.
std::vector<std::string> split_line(const std::string& line, std::size_t line_number);

class Reader {
public:
    /// Opens a CSV stream and checks that the header matches `expected`
    /// exactly. Pass an empty vector to accept any header (retrievable via
    /// header()).
    Reader(std::istream& in, const std::vector<std::string>& expected_header,
           std::string stream_name = "csv");

    const std::vector<std::string>& header() const { return header_; }
    const std::string& name() const { return name_; }

    /// Next data row, or nullopt at end of stream. Blank lines are skipped.
    std::optional<Row> next();

private:
    std::istream& in_;
    std::string name_;
    std::vector<std::string> header_;
    std::size_t line_ = 1;
};

std::string escape(const std::string& field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Parses a decimal number; throws RangeError naming the stream/line on
/// garbage or trailing characters.
double parse_number(const std::string& text, const std::string& stream_name,
                    std::size_t line_number);

}  // namespace csv

}  // namespace painstates
