#include "circuloop/core/csv.hpp"

#include <sstream>

#include "circuloop/core/error.hpp"

namespace circuloop::csv {

std::vector<Row> read_all(std::string_view text) {
    std::vector<Row> rows;
    Row current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    current.line = 1;

    auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        bool blank = current.fields.size() == 1 && current.fields.front().empty();
        if (!blank) {
            rows.push_back(std::move(current));
        }
        current = Row{};
        current.line = line;
    };

    // Skip a UTF-8 byte order mark.
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") {
        text.remove_prefix(3);
    }

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field_started || !field.empty()) {
                    fail(ErrorCode::ParseError,
                         "line " + std::to_string(line) + ": stray quote inside unquoted field");
                }
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                end_field();
                break;
            case '\r':
                break;
            case '\n':
                end_field();
                ++line;
                end_row();
                break;
            default:
                field.push_back(c);
                field_started = true;
        }
    }
    if (in_quotes) {
        fail(ErrorCode::ParseError, "line " + std::to_string(current.line) + ": unterminated quoted field");
    }
    if (field_started || !field.empty() || !current.fields.empty()) {
        end_field();
        end_row();
    }
    return rows;
}

std::vector<Row> read_all(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_all(buf.str());
}

Header::Header(const Row& header_row, const std::vector<std::string_view>& required)
    : names_(header_row.fields) {
    for (auto& n : names_) {
        while (!n.empty() && (n.back() == ' ' || n.back() == '\t')) n.pop_back();
        while (!n.empty() && (n.front() == ' ' || n.front() == '\t')) n.erase(n.begin());
    }
    for (auto name : required) {
        if (!find(name)) {
            fail(ErrorCode::ParseError,
                 "line " + std::to_string(header_row.line) + ": missing column '" + std::string(name) + "'");
        }
    }
}

std::optional<std::size_t> Header::find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::size_t Header::at(std::string_view name) const {
    auto idx = find(name);
    if (!idx) {
        fail(ErrorCode::ParseError, "missing column '" + std::string(name) + "'");
    }
    return *idx;
}

const std::string& Header::get(const Row& row, std::string_view name) const {
    static const std::string empty;
    auto idx = at(name);
    return idx < row.fields.size() ? row.fields[idx] : empty;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace circuloop::csv
