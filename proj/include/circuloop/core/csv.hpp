#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace circuloop::csv {

/// One parsed record plus the 1-based physical line it started on.
struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

/// RFC 4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
/// Blank lines are skipped. Throws DomainError(ParseError) on an unterminated quote.
std::vector<Row> read_all(std::istream& in);
std::vector<Row> read_all(std::string_view text);

/// Maps header names to column positions; required columns must all be present.
class Header {
public:
    Header(const Row& header_row, const std::vector<std::string_view>& required);

    std::optional<std::size_t> find(std::string_view name) const;
    std::size_t at(std::string_view name) const;

    /// Field value or empty string when the row is short.
    const std::string& get(const Row& row, std::string_view name) const;

private:
    std::vector<std::string> names_;
};

std::string escape(std::string_view field);

}  // namespace circuloop::csv
