#pragma once

// A small TOML reader covering the subset the run-spec format uses:
// [table] and [[array-of-table]] headers with dotted paths, bare or quoted
// keys, strings, integers, floats, booleans, and (nested, multi-line)
// arrays. Parses into nlohmann::json. Errors carry line and column.
//
// Not supported (rejected with a diagnostic): inline tables, multi-line
// strings, dates, dotted keys on the left of '='.

#include <json.hpp>

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

namespace ergo::toml {

struct parse_error : std::runtime_error {
    int line, col;
    parse_error(const std::string& msg, int line_, int col_)
        : std::runtime_error("toml:" + std::to_string(line_) + ":" + std::to_string(col_) + ": " +
                             msg),
          line(line_), col(col_) {}
};

namespace detail {

class Parser {
public:
    explicit Parser(const std::string& text) : src_(text) {}

    nlohmann::json parse() {
        root_ = nlohmann::json::object();
        table_ = &root_;
        while (true) {
            skip_blank(true);
            if (eof()) break;
            if (peek() == '[') {
                parse_header();
            } else {
                std::string key = parse_key();
                skip_blank(false);
                expect('=');
                skip_blank(false);
                nlohmann::json value = parse_value();
                skip_to_eol();
                if (table_->contains(key)) fail("duplicate key '" + key + "'");
                (*table_)[key] = std::move(value);
            }
        }
        return std::move(root_);
    }

private:
    bool eof() const { return pos_ >= src_.size(); }
    char peek() const { return src_[pos_]; }
    char get() {
        char c = src_[pos_++];
        if (c == '\n') { ++line_; col_ = 1; } else { ++col_; }
        return c;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw parse_error(msg, line_, col_); }

    void expect(char c) {
        if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
        get();
    }

    // whitespace and comments; newlines too when `newlines` is set
    void skip_blank(bool newlines) {
        while (!eof()) {
            char c = peek();
            if (c == ' ' || c == '\t' || (newlines && (c == '\n' || c == '\r'))) {
                get();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') get();
            } else {
                break;
            }
        }
    }

    void skip_to_eol() {
        skip_blank(false);
        if (!eof() && peek() != '\n' && peek() != '\r') fail("unexpected trailing characters");
    }

    void parse_header() {
        expect('[');
        bool array = !eof() && peek() == '[';
        if (array) get();
        std::vector<std::string> path;
        while (true) {
            skip_blank(false);
            path.push_back(parse_key());
            skip_blank(false);
            if (!eof() && peek() == '.') { get(); continue; }
            break;
        }
        expect(']');
        if (array) expect(']');
        skip_to_eol();
        table_ = resolve(path, array);
    }

    std::string parse_key() {
        if (eof()) fail("expected a key");
        if (peek() == '"') return parse_basic_string();
        std::string key;
        while (!eof()) {
            char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
                key += get();
            } else {
                break;
            }
        }
        if (key.empty()) fail("expected a key");
        return key;
    }

    std::string parse_basic_string() {
        expect('"');
        std::string out;
        while (true) {
            if (eof()) fail("unterminated string");
            char c = get();
            if (c == '"') break;
            if (c == '\n') fail("newline inside string");
            if (c == '\\') {
                if (eof()) fail("dangling escape");
                char e = get();
                switch (e) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                default: fail(std::string("unsupported escape '\\") + e + "'");
                }
            } else {
                out += c;
            }
        }
        return out;
    }

    nlohmann::json parse_value() {
        if (eof()) fail("expected a value");
        char c = peek();
        if (c == '"') return parse_basic_string();
        if (c == '[') return parse_array();
        if (c == '{') fail("inline tables are not supported");
        std::string tok;
        while (!eof()) {
            char d = peek();
            if (d == ' ' || d == '\t' || d == '\n' || d == '\r' || d == ',' || d == ']' || d == '#')
                break;
            tok += get();
        }
        if (tok == "true") return true;
        if (tok == "false") return false;
        if (tok.empty()) fail("expected a value");
        try {
            std::size_t used = 0;
            if (tok.find_first_of(".eE") == std::string::npos) {
                long long v = std::stoll(tok, &used);
                if (used == tok.size()) return v;
            } else {
                double v = std::stod(tok, &used);
                if (used == tok.size()) return v;
            }
        } catch (const std::exception&) {
        }
        fail("bad value '" + tok + "'");
    }

    nlohmann::json parse_array() {
        expect('[');
        nlohmann::json arr = nlohmann::json::array();
        while (true) {
            skip_blank(true);
            if (eof()) fail("unterminated array");
            if (peek() == ']') { get(); break; }
            arr.push_back(parse_value());
            skip_blank(true);
            if (eof()) fail("unterminated array");
            if (peek() == ',') { get(); continue; }
            if (peek() == ']') { get(); break; }
            fail("expected ',' or ']' in array");
        }
        return arr;
    }

    // Walks (creating as needed) to the table addressed by `path`; an
    // [[array]] header appends a fresh element at its final segment.
    // Intermediate segments that name arrays-of-tables descend into the
    // latest element, per TOML semantics.
    nlohmann::json* resolve(const std::vector<std::string>& path, bool array_header) {
        nlohmann::json* node = &root_;
        for (std::size_t i = 0; i < path.size(); ++i) {
            const std::string& seg = path[i];
            bool last = i + 1 == path.size();
            if (last && array_header) {
                if (!node->contains(seg)) (*node)[seg] = nlohmann::json::array();
                nlohmann::json& arr = (*node)[seg];
                if (!arr.is_array()) fail("'" + seg + "' is not an array of tables");
                arr.push_back(nlohmann::json::object());
                return &arr.back();
            }
            if (!node->contains(seg)) (*node)[seg] = nlohmann::json::object();
            nlohmann::json& next = (*node)[seg];
            if (next.is_array()) {
                if (next.empty() || !next.back().is_object())
                    fail("'" + seg + "' is not addressable as a table");
                node = &next.back();
            } else if (next.is_object()) {
                node = &next;
            } else {
                fail("key '" + seg + "' is not a table");
            }
        }
        return node;
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    nlohmann::json root_;
    nlohmann::json* table_ = nullptr;
};

} // namespace detail

inline nlohmann::json parse(const std::string& text) {
    return detail::Parser(text).parse();
}

} // namespace ergo::toml
