#include "nlwlab_tools/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "nlwlab/error.hpp"

namespace nlwlab::tools {

namespace {

[[noreturn]] void syntax(const std::string& origin, int line, const std::string& what) {
  fail(ErrorCode::config, origin + ":" + std::to_string(line) + ": " + what);
}

class Parser {
 public:
  Parser(const std::string& text, std::string origin) : s_(text), origin_(std::move(origin)) {}

  Table parse() {
    Table root;
    Table* current = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        skip_ws();
        std::vector<std::string> path{key()};
        skip_ws();
        while (peek() == '.') {
          ++pos_;
          skip_ws();
          path.push_back(key());
          skip_ws();
        }
        expect(']');
        end_of_line();
        current = &root;
        for (const auto& p : path) {
          if (current->has(p)) syntax(origin_, line_, "table '" + p + "' redefines a key");
          current = &current->tables[p];
        }
        const std::string joined = join(path);
        if (!defined_.insert(joined).second) syntax(origin_, line_, "table [" + joined + "] defined twice");
        continue;
      }
      const std::string k = key();
      skip_ws();
      expect('=');
      skip_ws();
      Value v = value();
      end_of_line();
      if (current->has(k) || current->has_table(k)) syntax(origin_, line_, "duplicate key '" + k + "'");
      current->values.emplace(k, std::move(v));
    }
    return root;
  }

 private:
  static std::string join(const std::vector<std::string>& p) {
    std::string out;
    for (const auto& x : p) out += (out.empty() ? "" : ".") + x;
    return out;
  }

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }

  void expect(char c) {
    if (peek() != c) syntax(origin_, line_, std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') ++pos_;
    }
  }

  void newline() {
    if (peek() == '\r') ++pos_;
    if (peek() == '\n') {
      ++pos_;
      ++line_;
    }
  }

  void skip_blank_lines() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        newline();
      } else {
        return;
      }
    }
  }

  // Whitespace, comments and newlines inside arrays.
  void skip_array_space() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        newline();
      } else {
        return;
      }
    }
  }

  void end_of_line() {
    skip_ws();
    skip_comment();
    if (eof()) return;
    if (peek() != '\n' && peek() != '\r') syntax(origin_, line_, "unexpected text after value");
    newline();
  }

  std::string key() {
    if (peek() == '"') return basic_string();
    std::string k;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) {
      k += s_[pos_++];
    }
    if (k.empty()) syntax(origin_, line_, "expected a key");
    return k;
  }

  std::string basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') syntax(origin_, line_, "unterminated string");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (eof()) syntax(origin_, line_, "unterminated escape");
        const char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: syntax(origin_, line_, std::string("unsupported escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  Value value() {
    const char c = peek();
    if (c == '"') return Value{basic_string()};
    if (c == '[') {
      ++pos_;
      Array arr;
      skip_array_space();
      while (peek() != ']') {
        arr.push_back(value());
        skip_array_space();
        if (peek() == ',') {
          ++pos_;
          skip_array_space();
        } else if (peek() != ']') {
          syntax(origin_, line_, "expected ',' or ']' in array");
        }
      }
      ++pos_;
      return Value{std::move(arr)};
    }
    std::string tok;
    while (!eof() && std::string(" \t\r\n,]#").find(peek()) == std::string::npos) tok += s_[pos_++];
    if (tok == "true") return Value{true};
    if (tok == "false") return Value{false};
    if (tok == "inf" || tok == "+inf") return Value{std::numeric_limits<double>::infinity()};
    if (tok == "-inf") return Value{-std::numeric_limits<double>::infinity()};
    if (tok == "nan" || tok == "+nan" || tok == "-nan") return Value{std::numeric_limits<double>::quiet_NaN()};
    std::string clean;
    for (char ch : tok) {
      if (ch != '_') clean += ch;
    }
    if (clean.empty()) syntax(origin_, line_, "expected a value");
    const bool is_float = clean.find_first_of(".eE") != std::string::npos;
    const char* first = clean.data() + (clean[0] == '+' ? 1 : 0);
    const char* last = clean.data() + clean.size();
    if (is_float) {
      double d = 0.0;
      auto [p, ec] = std::from_chars(first, last, d);
      if (ec != std::errc() || p != last) syntax(origin_, line_, "invalid number '" + tok + "'");
      return Value{d};
    }
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(first, last, i);
    if (ec != std::errc() || p != last) syntax(origin_, line_, "invalid value '" + tok + "'");
    return Value{i};
  }

  const std::string& s_;
  std::string origin_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::set<std::string> defined_;
};

std::string render_key(const std::string& k) {
  for (char c : k) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return "\"" + k + "\"";
  }
  return k;
}

std::string render_value(const Value& v) {
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  if (v.is_int()) return std::to_string(v.as_int());
  if (v.is_float()) {
    const double d = v.as_double();
    if (std::isnan(d)) return "nan";
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    // Shortest representation that round-trips.
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, d);
    std::string out(buf, res.ptr);
    if (out.find_first_of(".eE") == std::string::npos) out += ".0";
    return out;
  }
  if (v.is_string()) {
    std::string out = "\"";
    for (char c : v.as_string()) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default: out += c;
      }
    }
    return out + "\"";
  }
  std::string out = "[";
  const auto& arr = v.as_array();
  for (std::size_t i = 0; i < arr.size(); ++i) out += (i ? ", " : "") + render_value(arr[i]);
  return out + "]";
}

void render_table(const Table& t, const std::string& prefix, std::ostringstream& out) {
  if (!prefix.empty() && !t.values.empty()) out << "\n[" << prefix << "]\n";
  for (const auto& [k, v] : t.values) out << render_key(k) << " = " << render_value(v) << "\n";
  for (const auto& [name, sub] : t.tables) {
    render_table(sub, prefix.empty() ? render_key(name) : prefix + "." + render_key(name), out);
  }
}

const char* type_name(ValueType t) {
  switch (t) {
    case ValueType::boolean: return "boolean";
    case ValueType::integer: return "integer";
    case ValueType::number: return "number";
    case ValueType::string: return "string";
    case ValueType::number_array: return "array of numbers";
    case ValueType::string_array: return "array of strings";
  }
  return "?";
}

std::optional<Value> coerce(const Value& v, ValueType t) {
  switch (t) {
    case ValueType::boolean: return v.is_bool() ? std::optional<Value>(v) : std::nullopt;
    case ValueType::integer: return v.is_int() ? std::optional<Value>(v) : std::nullopt;
    case ValueType::number:
      return v.is_number() ? std::optional<Value>(Value{v.as_double()}) : std::nullopt;
    case ValueType::string: return v.is_string() ? std::optional<Value>(v) : std::nullopt;
    case ValueType::number_array: {
      if (!v.is_array()) return std::nullopt;
      Array out;
      for (const auto& x : v.as_array()) {
        if (!x.is_number()) return std::nullopt;
        out.push_back(Value{x.as_double()});
      }
      return Value{out};
    }
    case ValueType::string_array: {
      if (!v.is_array()) return std::nullopt;
      for (const auto& x : v.as_array()) {
        if (!x.is_string()) return std::nullopt;
      }
      return v;
    }
  }
  return std::nullopt;
}

}  // namespace

const Value* Table::find(const std::string& key) const {
  auto it = values.find(key);
  return it == values.end() ? nullptr : &it->second;
}

const Table* Table::find_table(const std::string& name) const {
  auto it = tables.find(name);
  return it == tables.end() ? nullptr : &it->second;
}

namespace {

const Value& must(const Table& t, const std::string& key) {
  const Value* v = t.find(key);
  if (v == nullptr) fail(ErrorCode::config, "missing key '" + key + "'");
  return *v;
}

}  // namespace

double Table::get_double(const std::string& key) const { return must(*this, key).as_double(); }
std::int64_t Table::get_int(const std::string& key) const { return must(*this, key).as_int(); }
bool Table::get_bool(const std::string& key) const { return must(*this, key).as_bool(); }
const std::string& Table::get_string(const std::string& key) const { return must(*this, key).as_string(); }

std::vector<double> Table::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& v : must(*this, key).as_array()) out.push_back(v.as_double());
  return out;
}

Table parse_toml(const std::string& text, const std::string& origin) {
  return Parser(text, origin).parse();
}

Table load_toml(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::config, "cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_toml(buf.str(), path.string());
}

std::string render_toml(const Table& table) {
  std::ostringstream out;
  render_table(table, "", out);
  return out.str();
}

Table validate(const Table& input, const TableSpec& spec, const std::string& path) {
  const std::string where = path.empty() ? "top level" : "[" + path + "]";
  Table out;
  for (const auto& [k, v] : input.values) {
    const KeySpec* ks = nullptr;
    for (const auto& cand : spec.keys) {
      if (cand.key == k) ks = &cand;
    }
    if (ks == nullptr) fail(ErrorCode::config, "unknown key '" + k + "' in " + where);
    auto c = coerce(v, ks->type);
    if (!c) fail(ErrorCode::config, "key '" + k + "' in " + where + " must be a " + type_name(ks->type));
    out.values.emplace(k, std::move(*c));
  }
  for (const auto& ks : spec.keys) {
    if (out.has(ks.key)) continue;
    if (ks.required) fail(ErrorCode::config, "missing required key '" + ks.key + "' in " + where);
    if (ks.fallback) out.values.emplace(ks.key, *coerce(*ks.fallback, ks.type));
  }
  for (const auto& [name, sub] : input.tables) {
    auto it = spec.tables.find(name);
    if (it == spec.tables.end()) fail(ErrorCode::config, "unknown table [" + (path.empty() ? name : path + "." + name) + "]");
    out.tables.emplace(name, validate(sub, it->second, path.empty() ? name : path + "." + name));
  }
  for (const auto& [name, sub] : spec.tables) {
    if (out.has_table(name)) continue;
    const std::string sub_path = path.empty() ? name : path + "." + name;
    if (sub.required) fail(ErrorCode::config, "missing required table [" + sub_path + "]");
    out.tables.emplace(name, validate(Table{}, sub, sub_path));
  }
  return out;
}

}  // namespace nlwlab::tools
