#include "chipletplace/toml.hpp"

#include "chipletplace/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace chiplet::toml {

const char* Value::type_name() const {
  if (is_string()) return "string";
  if (is_float()) return "float";
  if (is_integer()) return "integer";
  if (is_bool()) return "boolean";
  if (is_array()) return "array";
  return "table";
}

namespace {

class Parser {
public:
  Parser(const std::string& text, const std::string& origin)
      : text_(text), origin_(origin) {}

  Table parse() {
    Table root;
    Table* current = &root;
    while (!at_end()) {
      skip_ws_and_comments(true);
      if (at_end()) break;
      if (peek() == '[') {
        current = parse_header(root);
      } else {
        parse_key_value(*current);
      }
      expect_line_end();
    }
    return root;
  }

private:
  const std::string& text_;
  std::string origin_;
  std::size_t pos_ = 0;
  int line_ = 1;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(origin_ + ":" + std::to_string(line_) + ": " + msg);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') line_++;
    return c;
  }

  // newlines=true also consumes line breaks (used between statements and
  // inside arrays); newlines=false stops at the end of the current line.
  void skip_ws_and_comments(bool newlines) {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else if (c == '\n') {
        if (!newlines) return;
        advance();
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else {
        return;
      }
    }
  }

  void expect_line_end() {
    skip_ws_and_comments(false);
    if (at_end()) return;
    if (peek() != '\n') fail(std::string("unexpected trailing content starting with '") + peek() + "'");
    advance();
  }

  static bool is_bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string parse_key() {
    skip_ws_and_comments(false);
    if (at_end()) fail("expected key");
    if (peek() == '"') return parse_basic_string();
    std::string key;
    while (!at_end() && is_bare_char(peek())) key.push_back(advance());
    if (key.empty()) fail("expected key");
    return key;
  }

  std::vector<std::string> parse_dotted_key() {
    std::vector<std::string> parts;
    parts.push_back(parse_key());
    skip_ws_and_comments(false);
    while (!at_end() && peek() == '.') {
      advance();
      parts.push_back(parse_key());
      skip_ws_and_comments(false);
    }
    return parts;
  }

  std::string parse_basic_string() {
    advance(); // opening quote
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated string");
      char c = advance();
      if (c == '"') break;
      if (c == '\n') fail("newline in string");
      if (c == '\\') {
        if (at_end()) fail("unterminated escape");
        char e = advance();
        switch (e) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          default: fail(std::string("unsupported escape '\\") + e + "'");
        }
      } else {
        out.push_back(c);
      }
    }
    return out;
  }

  Table* parse_header(Table& root) {
    advance(); // '['
    bool array_of_tables = false;
    if (!at_end() && peek() == '[') {
      advance();
      array_of_tables = true;
    }
    std::vector<std::string> parts = parse_dotted_key();
    if (at_end() || advance() != ']') fail("expected ']' in table header");
    if (array_of_tables && (at_end() || advance() != ']')) fail("expected ']]' in table header");

    Table* node = &root;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      Value& slot = (*node)[parts[i]];
      if (slot.is_array()) {
        // descend into the latest element of an array of tables
        if (slot.as_array().empty() || !slot.as_array().back().is_table())
          fail("'" + parts[i] + "' is not a table");
        node = &slot.as_array().back().as_table();
      } else if (slot.is_table()) {
        node = &slot.as_table();
      } else {
        fail("key '" + parts[i] + "' already used for a value");
      }
    }

    const std::string& leaf = parts.back();
    auto it = node->find(leaf);
    if (array_of_tables) {
      if (it == node->end()) {
        it = node->emplace(leaf, Value(Array{})).first;
      } else if (!it->second.is_array()) {
        fail("'" + leaf + "' redefined as array of tables");
      }
      it->second.as_array().emplace_back(Table{});
      return &it->second.as_array().back().as_table();
    }
    if (it != node->end()) {
      if (!it->second.is_table()) fail("table '" + leaf + "' redefined");
      return &it->second.as_table();
    }
    it = node->emplace(leaf, Value(Table{})).first;
    return &it->second.as_table();
  }

  void parse_key_value(Table& table) {
    std::vector<std::string> parts = parse_dotted_key();
    skip_ws_and_comments(false);
    if (at_end() || advance() != '=') fail("expected '=' after key");
    skip_ws_and_comments(false);
    Value value = parse_value();

    Table* node = &table;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      Value& slot = (*node)[parts[i]];
      if (!slot.is_table()) fail("key '" + parts[i] + "' already used for a value");
      node = &slot.as_table();
    }
    if (node->count(parts.back())) fail("duplicate key '" + parts.back() + "'");
    node->emplace(parts.back(), std::move(value));
  }

  Value parse_value() {
    if (at_end()) fail("expected value");
    char c = peek();
    if (c == '"') return Value(parse_basic_string());
    if (c == '[') return parse_array();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string word;
      while (!at_end() && is_bare_char(peek())) word.push_back(advance());
      if (word == "true") return Value(true);
      if (word == "false") return Value(false);
      fail("unrecognized value '" + word + "'");
    }
    return parse_number();
  }

  Value parse_array() {
    advance(); // '['
    Array items;
    while (true) {
      skip_ws_and_comments(true);
      if (at_end()) fail("unterminated array");
      if (peek() == ']') {
        advance();
        break;
      }
      items.push_back(parse_value());
      skip_ws_and_comments(true);
      if (at_end()) fail("unterminated array");
      if (peek() == ',') {
        advance();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
    return Value(std::move(items));
  }

  Value parse_number() {
    std::string tok;
    while (!at_end()) {
      char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
          c == '.' || c == 'e' || c == 'E' || c == '_') {
        if (c != '_') tok.push_back(c);
        advance();
      } else {
        break;
      }
    }
    if (tok.empty()) fail("expected value");
    bool is_float = tok.find_first_of(".eE") != std::string::npos;
    if (!is_float) {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || p != tok.data() + tok.size()) fail("bad integer '" + tok + "'");
      return Value(v);
    }
    std::size_t consumed = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &consumed);
    } catch (const std::exception&) {
      fail("bad number '" + tok + "'");
    }
    if (consumed != tok.size() || !std::isfinite(v)) fail("bad number '" + tok + "'");
    return Value(v);
  }
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string s(buf);
  // ensure a float lexeme so the value round-trips as a float
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

bool needs_quoting(const std::string& key) {
  if (key.empty()) return true;
  for (char c : key)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return true;
  return false;
}

std::string key_str(const std::string& key) {
  return needs_quoting(key) ? quote(key) : key;
}

void write_scalar(std::ostream& os, const Value& v);

void write_array(std::ostream& os, const Array& a) {
  os << "[";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) os << ", ";
    write_scalar(os, a[i]);
  }
  os << "]";
}

void write_scalar(std::ostream& os, const Value& v) {
  if (v.is_string()) {
    os << quote(v.as_string());
  } else if (v.is_integer()) {
    os << v.as_integer();
  } else if (v.is_float()) {
    os << format_double(v.as_number());
  } else if (v.is_bool()) {
    os << (v.as_bool() ? "true" : "false");
  } else if (v.is_array()) {
    write_array(os, v.as_array());
  }
}

bool is_table_array(const Value& v) {
  if (!v.is_array()) return false;
  for (const Value& e : v.as_array())
    if (!e.is_table()) return false;
  return !v.as_array().empty();
}

void write_table(std::ostream& os, const Table& t, const std::string& prefix) {
  for (const auto& [key, value] : t) {
    if (value.is_table() || is_table_array(value)) continue;
    os << key_str(key) << " = ";
    write_scalar(os, value);
    os << "\n";
  }
  for (const auto& [key, value] : t) {
    std::string path = prefix.empty() ? key_str(key) : prefix + "." + key_str(key);
    if (value.is_table()) {
      os << "\n[" << path << "]\n";
      write_table(os, value.as_table(), path);
    } else if (is_table_array(value)) {
      for (const Value& e : value.as_array()) {
        os << "\n[[" << path << "]]\n";
        write_table(os, e.as_table(), path);
      }
    }
  }
}

} // namespace

Table parse(const std::string& text, const std::string& origin) {
  return Parser(text, origin).parse();
}

Table parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::string serialize(const Table& root) {
  std::ostringstream os;
  write_table(os, root, "");
  return os.str();
}

} // namespace chiplet::toml
