#include "synergylab/toml.hpp"

#include "synergylab/error.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace synergylab {

namespace {

struct Cursor {
    const std::string& text;
    size_t pos = 0;
    size_t line = 1;
    const std::string& origin;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
    }
    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char take() {
        char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }
    void skip_ws_inline() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos;
    }
    void skip_comment() {
        if (!eof() && peek() == '#')
            while (!eof() && peek() != '\n') ++pos;
    }
};

bool is_bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

std::string parse_string(Cursor& cur) {
    cur.take(); // opening quote
    std::string out;
    while (true) {
        if (cur.eof()) cur.fail("unterminated string");
        char c = cur.take();
        if (c == '"') break;
        if (c == '\n') cur.fail("newline in string");
        if (c == '\\') {
            if (cur.eof()) cur.fail("dangling escape");
            char e = cur.take();
            switch (e) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case 'r': out.push_back('\r'); break;
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                default: cur.fail(std::string("unsupported escape \\") + e);
            }
        } else {
            out.push_back(c);
        }
    }
    return out;
}

TomlTable::Value parse_value(Cursor& cur);

TomlTable::Value parse_scalar(Cursor& cur) {
    TomlTable::Value v;
    if (cur.peek() == '"') {
        v.kind = TomlTable::Value::Kind::String;
        v.str = parse_string(cur);
        return v;
    }
    size_t start = cur.pos;
    while (!cur.eof() && cur.peek() != ',' && cur.peek() != ']' && cur.peek() != '#' &&
           cur.peek() != '\n' && cur.peek() != ' ' && cur.peek() != '\t')
        ++cur.pos;
    std::string tok = cur.text.substr(start, cur.pos - start);
    if (tok.empty()) cur.fail("expected a value");
    if (tok == "true" || tok == "false") {
        v.kind = TomlTable::Value::Kind::Boolean;
        v.boolean = tok == "true";
        return v;
    }
    // integer first, float as fallback
    {
        int64_t iv = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), iv);
        if (ec == std::errc() && p == tok.data() + tok.size()) {
            v.kind = TomlTable::Value::Kind::Integer;
            v.integer = iv;
            v.number = double(iv);
            return v;
        }
    }
    {
        char* end = nullptr;
        double dv = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() + tok.size()) {
            v.kind = TomlTable::Value::Kind::Float;
            v.number = dv;
            return v;
        }
    }
    cur.fail("cannot parse value '" + tok + "'");
}

TomlTable::Value parse_value(Cursor& cur) {
    cur.skip_ws_inline();
    if (cur.eof()) cur.fail("expected a value");
    if (cur.peek() == '[') {
        cur.take();
        TomlTable::Value arr;
        arr.kind = TomlTable::Value::Kind::Array;
        cur.skip_ws_inline();
        if (!cur.eof() && cur.peek() == ']') {
            cur.take();
            return arr;
        }
        while (true) {
            cur.skip_ws_inline();
            arr.items.push_back(parse_scalar(cur));
            cur.skip_ws_inline();
            if (cur.eof()) cur.fail("unterminated array");
            char c = cur.take();
            if (c == ']') break;
            if (c != ',') cur.fail("expected ',' or ']' in array");
        }
        return arr;
    }
    return parse_scalar(cur);
}

} // namespace

TomlTable TomlTable::parse(const std::string& text, const std::string& origin) {
    TomlTable t;
    Cursor cur{text, 0, 1, origin};
    std::string section;
    while (!cur.eof()) {
        cur.skip_ws_inline();
        cur.skip_comment();
        if (cur.eof()) break;
        if (cur.peek() == '\n') {
            cur.take();
            continue;
        }
        if (cur.peek() == '[') {
            cur.take();
            std::string name;
            while (!cur.eof() && cur.peek() != ']') {
                char c = cur.take();
                if (!is_bare_key_char(c)) cur.fail("bad character in section name");
                name.push_back(c);
            }
            if (cur.eof()) cur.fail("unterminated section header");
            cur.take(); // ]
            if (name.empty()) cur.fail("empty section name");
            section = name;
            cur.skip_ws_inline();
            cur.skip_comment();
            if (!cur.eof() && cur.peek() != '\n') cur.fail("junk after section header");
            continue;
        }
        std::string key;
        while (!cur.eof() && is_bare_key_char(cur.peek())) key.push_back(cur.take());
        if (key.empty()) cur.fail("expected a key");
        cur.skip_ws_inline();
        if (cur.eof() || cur.take() != '=') cur.fail("expected '=' after key '" + key + "'");
        Value v = parse_value(cur);
        cur.skip_ws_inline();
        cur.skip_comment();
        if (!cur.eof() && cur.peek() != '\n') cur.fail("junk after value for key '" + key + "'");
        std::string full = section.empty() ? key : section + "." + key;
        if (t.entries_.count(full)) cur.fail("duplicate key '" + full + "'");
        t.entries_[full] = std::move(v);
    }
    return t;
}

TomlTable TomlTable::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

const TomlTable::Value* TomlTable::find(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

bool TomlTable::has(const std::string& key) const { return find(key) != nullptr; }

std::string TomlTable::get_string(const std::string& key, const std::string& fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::String) throw ConfigError("config key '" + key + "' must be a string");
    return v->str;
}

int64_t TomlTable::get_int(const std::string& key, int64_t fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::Integer)
        throw ConfigError("config key '" + key + "' must be an integer");
    return v->integer;
}

double TomlTable::get_double(const std::string& key, double fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::Integer && v->kind != Value::Kind::Float)
        throw ConfigError("config key '" + key + "' must be a number");
    return v->number;
}

bool TomlTable::get_bool(const std::string& key, bool fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::Boolean)
        throw ConfigError("config key '" + key + "' must be a boolean");
    return v->boolean;
}

std::vector<std::string> TomlTable::get_string_array(const std::string& key) const {
    const Value* v = find(key);
    if (!v) return {};
    if (v->kind != Value::Kind::Array)
        throw ConfigError("config key '" + key + "' must be an array");
    std::vector<std::string> out;
    for (const auto& item : v->items) {
        if (item.kind != Value::Kind::String)
            throw ConfigError("config key '" + key + "' must contain strings");
        out.push_back(item.str);
    }
    return out;
}

std::vector<double> TomlTable::get_double_array(const std::string& key) const {
    const Value* v = find(key);
    if (!v) return {};
    if (v->kind != Value::Kind::Array)
        throw ConfigError("config key '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& item : v->items) {
        if (item.kind != Value::Kind::Integer && item.kind != Value::Kind::Float)
            throw ConfigError("config key '" + key + "' must contain numbers");
        out.push_back(item.number);
    }
    return out;
}

std::string toml_escape(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

} // namespace synergylab
