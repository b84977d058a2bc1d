#ifndef CHIPLETPLACE_TOML_HPP
#define CHIPLETPLACE_TOML_HPP

// Minimal TOML reader covering the subset used by the config schema:
// [table] and [[array-of-table]] headers (dotted names allowed), bare or
// quoted keys, strings, integers, floats, booleans, and (nested, possibly
// multi-line) arrays. Anything outside that subset is a parse error.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace chiplet::toml {

class Value;
using Array = std::vector<Value>;
using Table = std::map<std::string, Value, std::less<>>;

class Value {
public:
  Value() : data_(Table{}) {}
  explicit Value(std::string s) : data_(std::move(s)) {}
  explicit Value(double d) : data_(d) {}
  explicit Value(std::int64_t i) : data_(i) {}
  explicit Value(bool b) : data_(b) {}
  explicit Value(Array a) : data_(std::move(a)) {}
  explicit Value(Table t) : data_(std::move(t)) {}

  bool is_string() const { return std::holds_alternative<std::string>(data_); }
  bool is_float() const { return std::holds_alternative<double>(data_); }
  bool is_integer() const { return std::holds_alternative<std::int64_t>(data_); }
  bool is_bool() const { return std::holds_alternative<bool>(data_); }
  bool is_array() const { return std::holds_alternative<Array>(data_); }
  bool is_table() const { return std::holds_alternative<Table>(data_); }
  bool is_number() const { return is_float() || is_integer(); }

  const std::string& as_string() const { return std::get<std::string>(data_); }
  std::int64_t as_integer() const { return std::get<std::int64_t>(data_); }
  bool as_bool() const { return std::get<bool>(data_); }
  // Numeric accessor: integers promote to double.
  double as_number() const {
    return is_integer() ? static_cast<double>(as_integer()) : std::get<double>(data_);
  }
  const Array& as_array() const { return std::get<Array>(data_); }
  Array& as_array() { return std::get<Array>(data_); }
  const Table& as_table() const { return std::get<Table>(data_); }
  Table& as_table() { return std::get<Table>(data_); }

  const char* type_name() const;

private:
  std::variant<std::string, double, std::int64_t, bool, Array, Table> data_;
};

// Parses TOML text; throws ConfigError with a line number on malformed input.
Table parse(const std::string& text, const std::string& origin = "<string>");

// Reads and parses a file; throws ConfigError if the file cannot be read.
Table parse_file(const std::string& path);

// Serializes a table in canonical form (sorted keys, sub-tables after
// scalar keys, floats printed with round-trip precision).
std::string serialize(const Table& root);

} // namespace chiplet::toml

#endif
