#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace synergylab {

// Small TOML subset sufficient for run configs: [section] headers,
// key = value with strings, integers, floats, booleans and single-line
// arrays of those, # comments. Keys are addressed as "section.key".
class TomlTable {
  public:
    struct Value {
        enum class Kind : uint8_t { String, Integer, Float, Boolean, Array } kind = Kind::String;
        std::string str;
        int64_t integer = 0;
        double number = 0;
        bool boolean = false;
        std::vector<Value> items;
    };

    static TomlTable parse(const std::string& text, const std::string& origin = "<string>");
    static TomlTable from_file(const std::string& path);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    int64_t get_int(const std::string& key, int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_string_array(const std::string& key) const;
    std::vector<double> get_double_array(const std::string& key) const;

    const std::map<std::string, Value>& entries() const { return entries_; }

  private:
    const Value* find(const std::string& key) const;
    std::map<std::string, Value> entries_;
};

// Serialization helper for writing config copies into run directories.
std::string toml_escape(const std::string& s);

} // namespace synergylab
