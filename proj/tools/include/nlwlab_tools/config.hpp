#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace nlwlab::tools {

/// A subset of TOML: comments, [dotted.table] headers, bare keys, strings,
/// integers, floats (inf/nan included), booleans and (possibly multi-line)
/// arrays of those. No inline tables, dates or array-of-tables.
struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<bool, std::int64_t, double, std::string, Array> data;

  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(data); }
  bool is_float() const { return std::holds_alternative<double>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
  bool is_number() const { return is_int() || is_float(); }

  bool as_bool() const { return std::get<bool>(data); }
  std::int64_t as_int() const { return std::get<std::int64_t>(data); }
  double as_double() const { return is_int() ? static_cast<double>(as_int()) : std::get<double>(data); }
  const std::string& as_string() const { return std::get<std::string>(data); }
  const Array& as_array() const { return std::get<Array>(data); }

  friend bool operator==(const Value&, const Value&) = default;
};

class Table {
 public:
  std::map<std::string, Value> values;
  std::map<std::string, Table> tables;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  bool has_table(const std::string& name) const { return tables.count(name) != 0; }
  const Value* find(const std::string& key) const;
  const Table* find_table(const std::string& name) const;
  Table& table(const std::string& name) { return tables[name]; }

  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  const std::string& get_string(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;

  friend bool operator==(const Table&, const Table&) = default;
};

/// Throws nlwlab::Error(ErrorCode::config) with a line number on syntax errors.
Table parse_toml(const std::string& text, const std::string& origin = "<config>");
Table load_toml(const std::filesystem::path& path);
/// Canonical rendering: root keys first, then tables in sorted order.
std::string render_toml(const Table& table);

// ---------------------------------------------------------------------------

enum class ValueType { boolean, integer, number, string, number_array, string_array };

struct KeySpec {
  std::string key;
  ValueType type;
  std::optional<Value> fallback;  // filled in when absent
  bool required = false;
};

struct TableSpec {
  std::vector<KeySpec> keys;
  std::map<std::string, TableSpec> tables;
  bool required = false;
};

/// Rejects unknown keys and tables, checks types, fills defaults. Returns
/// the resolved table; integer values given for number keys become floats.
Table validate(const Table& input, const TableSpec& spec, const std::string& path = "");

}  // namespace nlwlab::tools
