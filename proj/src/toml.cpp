#include "liaplab/toml.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "liaplab/coefficients.hpp" // ConfigError

namespace liaplab::toml {

namespace {

struct Cursor {
    const std::string& s;
    std::size_t pos = 0;
    int line = 1;

    bool done() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }
    char take()
    {
        const char c = s[pos++];
        if (c == '\n')
            ++line;
        return c;
    }
    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ConfigError("toml: " + msg + " (line " + std::to_string(line) + ")");
    }
    void skip_ws_inline()
    {
        while (!done() && (peek() == ' ' || peek() == '\t'))
            take();
    }
    void skip_ws_and_comments()
    {
        while (!done()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                take();
            } else if (c == '#') {
                while (!done() && peek() != '\n')
                    take();
            } else {
                break;
            }
        }
    }
};

bool is_bare_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_bare_key(Cursor& c)
{
    std::string k;
    while (!c.done() && is_bare_char(c.peek()))
        k.push_back(c.take());
    if (k.empty())
        c.fail("expected a key");
    return k;
}

std::string parse_string(Cursor& c)
{
    c.take(); // opening quote
    std::string out;
    while (true) {
        if (c.done())
            c.fail("unterminated string");
        char ch = c.take();
        if (ch == '"')
            break;
        if (ch == '\\') {
            if (c.done())
                c.fail("unterminated escape");
            const char e = c.take();
            switch (e) {
            case '"': out.push_back('"'); break;
            case '\\': out.push_back('\\'); break;
            case 'n': out.push_back('\n'); break;
            case 't': out.push_back('\t'); break;
            default: c.fail(std::string("unsupported escape \\") + e);
            }
        } else {
            out.push_back(ch);
        }
    }
    return out;
}

Value parse_value(Cursor& c);

Value parse_array(Cursor& c)
{
    c.take(); // '['
    Array arr;
    while (true) {
        c.skip_ws_and_comments();
        if (c.done())
            c.fail("unterminated array");
        if (c.peek() == ']') {
            c.take();
            break;
        }
        arr.push_back(parse_value(c));
        c.skip_ws_and_comments();
        if (c.done())
            c.fail("unterminated array");
        if (c.peek() == ',') {
            c.take();
        } else if (c.peek() == ']') {
            c.take();
            break;
        } else {
            c.fail("expected ',' or ']' in array");
        }
    }
    return Value{std::move(arr)};
}

Value parse_value(Cursor& c)
{
    c.skip_ws_inline();
    if (c.done())
        c.fail("expected a value");
    const char ch = c.peek();
    if (ch == '"')
        return Value{parse_string(c)};
    if (ch == '[')
        return parse_array(c);
    // bare token: bool, inf, nan, or number
    std::string tok;
    while (!c.done() && (is_bare_char(c.peek()) || c.peek() == '+' || c.peek() == '.'))
        tok.push_back(c.take());
    if (tok.empty())
        c.fail("expected a value");
    if (tok == "true")
        return Value{true};
    if (tok == "false")
        return Value{false};
    if (tok == "inf" || tok == "+inf")
        return Value{std::numeric_limits<double>::infinity()};
    if (tok == "-inf")
        return Value{-std::numeric_limits<double>::infinity()};
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == nullptr || *end != '\0')
        c.fail("cannot parse value '" + tok + "'");
    return Value{v};
}

} // namespace

bool Value::as_bool() const
{
    if (!is_bool())
        throw ConfigError("toml: expected a boolean value");
    return std::get<bool>(data);
}

double Value::as_number() const
{
    if (!is_number())
        throw ConfigError("toml: expected a numeric value");
    return std::get<double>(data);
}

long long Value::as_integer() const
{
    const double v = as_number();
    const double r = std::nearbyint(v);
    if (r != v)
        throw ConfigError("toml: expected an integer value, got " + std::to_string(v));
    return static_cast<long long>(r);
}

const std::string& Value::as_string() const
{
    if (!is_string())
        throw ConfigError("toml: expected a string value");
    return std::get<std::string>(data);
}

const Array& Value::as_array() const
{
    if (!is_array())
        throw ConfigError("toml: expected an array value");
    return std::get<Array>(data);
}

Document parse(const std::string& text)
{
    Document doc;
    Cursor c{text};
    Table* current = &doc.root;
    std::string current_name;

    while (true) {
        c.skip_ws_and_comments();
        if (c.done())
            break;
        if (c.peek() == '[') {
            c.take();
            c.skip_ws_inline();
            const std::string name = parse_bare_key(c);
            c.skip_ws_inline();
            if (c.done() || c.peek() != ']')
                c.fail("expected ']' after table name");
            c.take();
            if (doc.tables.count(name))
                c.fail("duplicate table [" + name + "]");
            current = &doc.tables[name];
            current_name = name;
        } else {
            const std::string key = parse_bare_key(c);
            c.skip_ws_inline();
            if (c.done() || c.peek() != '=')
                c.fail("expected '=' after key '" + key + "'");
            c.take();
            Value v = parse_value(c);
            if (current->count(key))
                c.fail("duplicate key '" + key + "'" +
                       (current_name.empty() ? "" : " in [" + current_name + "]"));
            current->emplace(key, std::move(v));
            c.skip_ws_inline();
            if (!c.done() && c.peek() != '\n' && c.peek() != '\r' && c.peek() != '#')
                c.fail("unexpected trailing characters after value of '" + key + "'");
        }
    }
    return doc;
}

Document parse_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

} // namespace liaplab::toml
