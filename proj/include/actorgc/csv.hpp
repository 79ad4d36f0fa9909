#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace actorgc::csv {

// RFC 4180 reader: quoted fields may contain delimiters, doubled quotes and
// line breaks. A leading UTF-8 BOM is skipped.
class Reader {
public:
    explicit Reader(std::istream& in, char delimiter = ',') : in_(in), delim_(delimiter) {
        if (in_.peek() == 0xEF) {
            char bom[3];
            in_.read(bom, 3);
            if (!(static_cast<unsigned char>(bom[1]) == 0xBB && static_cast<unsigned char>(bom[2]) == 0xBF)) {
                for (int i = 2; i >= 0; --i) in_.putback(bom[i]);
            }
        }
    }

    // Reads the next record; returns false at end of input. Blank lines are skipped.
    bool next(std::vector<std::string>& fields) {
        fields.clear();
        std::string field;
        bool in_quotes = false;
        bool any = false;
        bool field_quoted = false;
        for (;;) {
            const int ch = in_.get();
            if (ch == std::char_traits<char>::eof()) {
                if (in_quotes) throw ParseError("csv: unterminated quoted field at line " + std::to_string(line_));
                if (!any) return false;
                fields.push_back(std::move(field));
                ++line_;
                return true;
            }
            const char c = static_cast<char>(ch);
            if (in_quotes) {
                if (c == '"') {
                    if (in_.peek() == '"') {
                        in_.get();
                        field.push_back('"');
                    } else {
                        in_quotes = false;
                    }
                } else {
                    if (c == '\n') ++line_;
                    field.push_back(c);
                }
                continue;
            }
            if (c == '\r') continue;
            if (c == '\n') {
                if (!any) {
                    ++line_;
                    continue;
                }
                fields.push_back(std::move(field));
                ++line_;
                return true;
            }
            any = true;
            if (c == delim_) {
                fields.push_back(std::move(field));
                field.clear();
                field_quoted = false;
            } else if (c == '"' && field.empty() && !field_quoted) {
                in_quotes = true;
                field_quoted = true;
            } else {
                field.push_back(c);
            }
        }
    }

    // 1-based physical line number of the record most recently returned.
    std::size_t line() const { return line_; }

private:
    std::istream& in_;
    char delim_;
    std::size_t line_ = 0;
};

inline std::string quote(std::string_view field, char delimiter = ',') {
    const bool needs = field.find_first_of(std::string{delimiter} + "\"\r\n") != std::string_view::npos;
    if (!needs) return std::string{field};
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter = ',') {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << delimiter;
        out << quote(fields[i], delimiter);
    }
    out << '\n';
}

} // namespace actorgc::csv
