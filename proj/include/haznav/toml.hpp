#pragma once

// Minimal TOML subset parser, enough for this project's config files:
// comments, [tables], [[arrays of tables]], bare/dotted keys, strings with
// basic escapes, integers, floats, booleans, and (possibly nested, possibly
// multiline) arrays. No dates, no inline tables, no multiline strings.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace haznav::toml {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Value {
    enum class Type { table, array, string, integer, floating, boolean };
    Type type{Type::table};

    std::map<std::string, Value> table;
    std::vector<Value> array;
    std::string str;
    long long integer{0};
    double floating{0.0};
    bool boolean{false};

    bool is_table() const { return type == Type::table; }
    bool is_array() const { return type == Type::array; }

    bool contains(const std::string& key) const {
        return is_table() && table.find(key) != table.end();
    }

    const Value& at(const std::string& key) const {
        if (!is_table()) throw ParseError("'" + key + "': parent is not a table");
        auto it = table.find(key);
        if (it == table.end()) throw ParseError("missing required key '" + key + "'");
        return it->second;
    }

    double as_double() const {
        if (type == Type::floating) return floating;
        if (type == Type::integer) return static_cast<double>(integer);
        throw ParseError("expected a number");
    }

    long long as_int() const {
        if (type == Type::integer) return integer;
        throw ParseError("expected an integer");
    }

    const std::string& as_string() const {
        if (type != Type::string) throw ParseError("expected a string");
        return str;
    }

    bool as_bool() const {
        if (type != Type::boolean) throw ParseError("expected a boolean");
        return boolean;
    }

    // typed lookups with defaults
    double get_double(const std::string& key, double fallback) const {
        return contains(key) ? at(key).as_double() : fallback;
    }
    long long get_int(const std::string& key, long long fallback) const {
        return contains(key) ? at(key).as_int() : fallback;
    }
    std::string get_string(const std::string& key, const std::string& fallback) const {
        return contains(key) ? at(key).as_string() : fallback;
    }
    bool get_bool(const std::string& key, bool fallback) const {
        return contains(key) ? at(key).as_bool() : fallback;
    }
};

namespace detail {

struct Cursor {
    const std::string& text;
    std::size_t pos{0};
    int line{1};

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char take() {
        const char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("line " + std::to_string(line) + ": " + msg);
    }
};

inline void skip_ws(Cursor& c, bool cross_lines) {
    while (!c.eof()) {
        const char ch = c.peek();
        if (ch == ' ' || ch == '\t' || (cross_lines && (ch == '\n' || ch == '\r'))) {
            c.take();
        } else if (ch == '#') {
            while (!c.eof() && c.peek() != '\n') c.take();
        } else {
            break;
        }
    }
}

inline bool bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

inline std::string parse_bare_key(Cursor& c) {
    std::string key;
    while (!c.eof() && bare_key_char(c.peek())) key += c.take();
    if (key.empty()) c.fail("expected a key");
    return key;
}

inline std::string parse_basic_string(Cursor& c) {
    if (c.take() != '"') c.fail("expected '\"'");
    std::string out;
    while (true) {
        if (c.eof()) c.fail("unterminated string");
        char ch = c.take();
        if (ch == '"') break;
        if (ch == '\n') c.fail("newline in basic string");
        if (ch == '\\') {
            if (c.eof()) c.fail("dangling escape");
            const char esc = c.take();
            switch (esc) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: c.fail(std::string("unsupported escape \\") + esc);
            }
        } else {
            out += ch;
        }
    }
    return out;
}

inline Value parse_value(Cursor& c);

inline Value parse_array(Cursor& c) {
    if (c.take() != '[') c.fail("expected '['");
    Value v;
    v.type = Value::Type::array;
    skip_ws(c, true);
    if (!c.eof() && c.peek() == ']') {
        c.take();
        return v;
    }
    while (true) {
        skip_ws(c, true);
        v.array.push_back(parse_value(c));
        skip_ws(c, true);
        if (c.eof()) c.fail("unterminated array");
        const char ch = c.take();
        if (ch == ']') break;
        if (ch != ',') c.fail("expected ',' or ']' in array");
        skip_ws(c, true);
        if (!c.eof() && c.peek() == ']') {  // trailing comma
            c.take();
            break;
        }
    }
    return v;
}

inline Value parse_scalar(Cursor& c) {
    std::string tok;
    while (!c.eof()) {
        const char ch = c.peek();
        if (ch == ',' || ch == ']' || ch == '\n' || ch == '\r' || ch == '#' || ch == ' ' || ch == '\t') break;
        tok += c.take();
    }
    if (tok.empty()) c.fail("expected a value");
    Value v;
    if (tok == "true" || tok == "false") {
        v.type = Value::Type::boolean;
        v.boolean = tok == "true";
        return v;
    }
    const bool looks_float = tok.find_first_of(".eE") != std::string::npos ||
                             tok == "inf" || tok == "-inf" || tok == "nan";
    try {
        std::size_t used = 0;
        if (looks_float) {
            v.type = Value::Type::floating;
            v.floating = std::stod(tok, &used);
        } else {
            v.type = Value::Type::integer;
            v.integer = std::stoll(tok, &used);
        }
        if (used != tok.size()) c.fail("malformed number '" + tok + "'");
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        c.fail("malformed value '" + tok + "'");
    }
    return v;
}

inline Value parse_value(Cursor& c) {
    skip_ws(c, true);
    if (c.eof()) c.fail("expected a value");
    const char ch = c.peek();
    if (ch == '"') {
        Value v;
        v.type = Value::Type::string;
        v.str = parse_basic_string(c);
        return v;
    }
    if (ch == '[') return parse_array(c);
    return parse_scalar(c);
}

inline std::vector<std::string> parse_key_path(Cursor& c) {
    std::vector<std::string> path;
    while (true) {
        skip_ws(c, false);
        path.push_back(parse_bare_key(c));
        skip_ws(c, false);
        if (!c.eof() && c.peek() == '.') {
            c.take();
            continue;
        }
        break;
    }
    return path;
}

inline Value* descend(Value* root, const std::vector<std::string>& path, Cursor& c) {
    Value* cur = root;
    for (const auto& key : path) {
        if (!cur->is_table()) c.fail("key '" + key + "' addresses a non-table");
        auto it = cur->table.try_emplace(key).first;
        cur = &it->second;
        if (cur->is_array()) {  // [[x]] then [x.y]: descend into last element
            if (cur->array.empty() || !cur->array.back().is_table())
                c.fail("key '" + key + "' addresses a non-table array");
            cur = &cur->array.back();
        }
    }
    return cur;
}

}  // namespace detail

inline Value parse(const std::string& text) {
    detail::Cursor c{text};
    Value root;
    Value* current = &root;

    while (true) {
        detail::skip_ws(c, true);
        if (c.eof()) break;
        const char ch = c.peek();
        if (ch == '[') {
            c.take();
            const bool array_of_tables = !c.eof() && c.peek() == '[';
            if (array_of_tables) c.take();
            const auto path = detail::parse_key_path(c);
            detail::skip_ws(c, false);
            if (c.eof() || c.take() != ']') c.fail("expected ']'");
            if (array_of_tables && (c.eof() || c.take() != ']')) c.fail("expected ']]'");

            if (array_of_tables) {
                std::vector<std::string> parent_path(path.begin(), path.end() - 1);
                Value* parent = detail::descend(&root, parent_path, c);
                auto [it, inserted] = parent->table.try_emplace(path.back());
                Value& arr = it->second;
                if (inserted) arr.type = Value::Type::array;
                if (!arr.is_array()) c.fail("'" + path.back() + "' is not an array of tables");
                arr.array.emplace_back();
                current = &arr.array.back();
            } else {
                current = detail::descend(&root, path, c);
                if (!current->is_table()) c.fail("table header clashes with existing value");
            }
        } else {
            const auto path = detail::parse_key_path(c);
            detail::skip_ws(c, false);
            if (c.eof() || c.take() != '=') c.fail("expected '=' after key");
            Value value = detail::parse_value(c);
            std::vector<std::string> parent_path(path.begin(), path.end() - 1);
            Value* parent = detail::descend(current, parent_path, c);
            if (!parent->table.try_emplace(path.back(), std::move(value)).second)
                c.fail("duplicate key '" + path.back() + "'");
        }
    }
    return root;
}

inline Value parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

}  // namespace haznav::toml
