#ifndef LIAPLAB_TOML_HPP
#define LIAPLAB_TOML_HPP

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace liaplab::toml {

/// Minimal TOML subset: [tables], bare keys, strings, numbers, booleans, and
/// (possibly nested) arrays. Covers exactly the shape of the run configs.
struct Value;
using Array = std::vector<Value>;

struct Value {
    std::variant<bool, double, std::string, Array> data;

    bool is_bool() const { return std::holds_alternative<bool>(data); }
    bool is_number() const { return std::holds_alternative<double>(data); }
    bool is_string() const { return std::holds_alternative<std::string>(data); }
    bool is_array() const { return std::holds_alternative<Array>(data); }

    bool as_bool() const;
    double as_number() const;
    /// Number that must be an exact integer.
    long long as_integer() const;
    const std::string& as_string() const;
    const Array& as_array() const;
};

using Table = std::map<std::string, Value>;

struct Document {
    Table root;                           // keys before the first [table]
    std::map<std::string, Table> tables;

    bool has_table(const std::string& name) const { return tables.count(name) != 0; }
};

/// Throws liaplab::ConfigError with a line number on malformed input.
Document parse(const std::string& text);
Document parse_file(const std::string& path);

} // namespace liaplab::toml

#endif
