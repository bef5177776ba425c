#ifndef COEA_CSV_HPP
#define COEA_CSV_HPP

#include <charconv>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "errors.hpp"

namespace coea::csv {

/// RFC 4180 field quoting: quote only when needed, double embedded quotes.
inline std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

/// Shortest decimal form that round-trips.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Reads one RFC 4180 record; returns nullopt at end of input.
inline std::optional<std::vector<std::string>> read_record(std::istream& in) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    char ch;
    while (in.get(ch)) {
        any = true;
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get(ch);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                field += ch;
            }
            continue;
        }
        if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            fields.push_back(std::move(field));
            return fields;
        } else if (ch != '\r') {
            field += ch;
        }
    }
    if (in_quotes) throw ConfigError("csv: unterminated quoted field");
    if (!any) return std::nullopt;
    fields.push_back(std::move(field));
    return fields;
}

template <class T>
T parse_number(const std::string& s, const char* what) {
    T value{};
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, value);
    if (res.ec != std::errc{} || res.ptr != end) throw ConfigError(std::string("csv: bad numeric field ") + what);
    return value;
}

}  // namespace coea::csv

#endif  // COEA_CSV_HPP
