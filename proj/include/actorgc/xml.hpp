#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"

namespace actorgc::xml {

struct Attribute {
    std::string name;
    std::string value;
};

class SyntaxError : public ParseError {
public:
    SyntaxError(std::size_t offset, const std::string& what)
        : ParseError("xml: " + what + " at byte offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Minimal non-validating pull parser covering what event logs use: elements,
// attributes, comments, processing instructions, CDATA and a DOCTYPE without
// an internal subset. Character data is skipped. Tags are checked for proper
// nesting and a single root element.
//
// Handler must provide:
//   void start_element(std::string_view name, const std::vector<Attribute>&, std::size_t offset);
//   void end_element(std::string_view name);
template <class Handler>
void parse(std::string_view doc, Handler& handler) {
    std::size_t pos = 0;
    std::vector<std::string> stack;
    bool seen_root = false;
    std::vector<Attribute> attrs;

    auto fail = [&](const std::string& what) { throw SyntaxError(pos, what); };
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
    auto is_name_char = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
               c == ':' || c == '-' || c == '.' || static_cast<unsigned char>(c) >= 0x80;
    };
    auto skip_space = [&] {
        while (pos < doc.size() && is_space(doc[pos])) ++pos;
    };
    auto read_name = [&]() -> std::string_view {
        const std::size_t start = pos;
        while (pos < doc.size() && is_name_char(doc[pos])) ++pos;
        if (pos == start) fail("expected a name");
        return doc.substr(start, pos - start);
    };
    auto expect_through = [&](std::string_view terminator, const char* what) {
        const auto end = doc.find(terminator, pos);
        if (end == std::string_view::npos) fail(std::string("unterminated ") + what);
        pos = end + terminator.size();
    };
    auto decode = [&](std::string_view raw, std::size_t raw_offset) {
        std::string out;
        out.reserve(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] == '<') throw SyntaxError(raw_offset + i, "'<' in attribute value");
            if (raw[i] != '&') {
                out.push_back(raw[i]);
                continue;
            }
            const auto semi = raw.find(';', i);
            if (semi == std::string_view::npos) throw SyntaxError(raw_offset + i, "unterminated entity");
            const auto ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "lt") out.push_back('<');
            else if (ent == "gt") out.push_back('>');
            else if (ent == "amp") out.push_back('&');
            else if (ent == "quot") out.push_back('"');
            else if (ent == "apos") out.push_back('\'');
            else if (!ent.empty() && ent[0] == '#') {
                std::uint32_t cp = 0;
                const bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
                const auto digits = ent.substr(hex ? 2 : 1);
                if (digits.empty()) throw SyntaxError(raw_offset + i, "bad character reference");
                for (char c : digits) {
                    int v;
                    if (c >= '0' && c <= '9') v = c - '0';
                    else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
                    else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
                    else throw SyntaxError(raw_offset + i, "bad character reference");
                    cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
                    if (cp > 0x10FFFF) throw SyntaxError(raw_offset + i, "bad character reference");
                }
                if (cp < 0x80) {
                    out.push_back(static_cast<char>(cp));
                } else if (cp < 0x800) {
                    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
                    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
                } else if (cp < 0x10000) {
                    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
                    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
                    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
                } else {
                    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
                    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
                    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
                    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
                }
            } else {
                throw SyntaxError(raw_offset + i, "unknown entity '&" + std::string(ent) + ";'");
            }
            i = semi;
        }
        return out;
    };

    if (doc.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;

    while (pos < doc.size()) {
        if (doc[pos] != '<') {
            const std::size_t start = pos;
            const auto next = doc.find('<', pos);
            pos = next == std::string_view::npos ? doc.size() : next;
            if (stack.empty()) {
                for (std::size_t i = start; i < pos; ++i) {
                    if (!is_space(doc[i])) {
                        pos = i;
                        fail("character data outside the root element");
                    }
                }
            }
            continue;
        }
        if (doc.compare(pos, 4, "<!--") == 0) {
            pos += 4;
            expect_through("-->", "comment");
        } else if (doc.compare(pos, 9, "<![CDATA[") == 0) {
            if (stack.empty()) fail("CDATA outside the root element");
            pos += 9;
            expect_through("]]>", "CDATA section");
        } else if (doc.compare(pos, 2, "<?") == 0) {
            pos += 2;
            expect_through("?>", "processing instruction");
        } else if (doc.compare(pos, 9, "<!DOCTYPE") == 0) {
            if (seen_root) fail("DOCTYPE after the root element");
            pos += 9;
            int depth = 0;
            while (pos < doc.size() && (doc[pos] != '>' || depth > 0)) {
                if (doc[pos] == '[') ++depth;
                if (doc[pos] == ']') --depth;
                ++pos;
            }
            if (pos >= doc.size()) fail("unterminated DOCTYPE");
            ++pos;
        } else if (doc.compare(pos, 2, "</") == 0) {
            const std::size_t tag_offset = pos;
            pos += 2;
            const auto name = read_name();
            skip_space();
            if (pos >= doc.size() || doc[pos] != '>') fail("expected '>'");
            ++pos;
            if (stack.empty() || stack.back() != name) {
                throw SyntaxError(tag_offset, "mismatched end tag </" + std::string(name) + ">");
            }
            stack.pop_back();
            handler.end_element(name);
        } else {
            const std::size_t tag_offset = pos;
            ++pos;
            const auto name = read_name();
            if (stack.empty() && seen_root) throw SyntaxError(tag_offset, "multiple root elements");
            attrs.clear();
            bool self_closing = false;
            for (;;) {
                const std::size_t before = pos;
                skip_space();
                if (pos >= doc.size()) fail("unterminated start tag");
                if (doc[pos] == '>') {
                    ++pos;
                    break;
                }
                if (doc[pos] == '/') {
                    ++pos;
                    if (pos >= doc.size() || doc[pos] != '>') fail("expected '>' after '/'");
                    ++pos;
                    self_closing = true;
                    break;
                }
                if (pos == before) fail("expected whitespace before attribute");
                Attribute a;
                a.name = std::string(read_name());
                skip_space();
                if (pos >= doc.size() || doc[pos] != '=') fail("expected '=' after attribute name");
                ++pos;
                skip_space();
                if (pos >= doc.size() || (doc[pos] != '"' && doc[pos] != '\'')) fail("expected quoted attribute value");
                const char q = doc[pos++];
                const auto end = doc.find(q, pos);
                if (end == std::string_view::npos) fail("unterminated attribute value");
                a.value = decode(doc.substr(pos, end - pos), pos);
                pos = end + 1;
                for (const auto& prev : attrs) {
                    if (prev.name == a.name) throw SyntaxError(tag_offset, "duplicate attribute '" + a.name + "'");
                }
                attrs.push_back(std::move(a));
            }
            seen_root = true;
            handler.start_element(name, attrs, tag_offset);
            if (self_closing) {
                handler.end_element(name);
            } else {
                stack.emplace_back(name);
            }
        }
    }
    if (!stack.empty()) fail("unclosed element <" + stack.back() + ">");
    if (!seen_root) fail("no root element");
}

} // namespace actorgc::xml
