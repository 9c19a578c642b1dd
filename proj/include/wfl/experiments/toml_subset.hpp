#pragma once

#include <charconv>
#include <cmath>
#include <cctype>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "wfl/core.hpp"

namespace wfl::experiments {

/// Parse failure annotated with a 1-based line and column.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : Error(format(msg, line, column)), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& msg, std::size_t line, std::size_t column) {
    std::ostringstream os;
    os << "parse error at line " << line << ", column " << column << ": " << msg;
    return os.str();
  }
  std::size_t line_, column_;
};

struct TomlValue;
using TomlArray = std::vector<TomlValue>;

struct TomlValue {
  std::variant<double, bool, std::string, TomlArray> data;
  std::size_t line = 0;
  std::size_t column = 0;

  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_array() const { return std::holds_alternative<TomlArray>(data); }
};

struct TomlEntry {
  std::string key;
  TomlValue value;
};

/// Sections in file order; the unnamed top-level section is "".
struct TomlDocument {
  std::vector<std::pair<std::string, std::vector<TomlEntry>>> sections;

  const TomlValue* find(const std::string& section, const std::string& key) const {
    for (const auto& [name, entries] : sections)
      if (name == section)
        for (const auto& e : entries)
          if (e.key == key) return &e.value;
    return nullptr;
  }
};

namespace detail {

class TomlParser {
 public:
  explicit TomlParser(const std::string& text) : s_(text) {}

  TomlDocument parse() {
    TomlDocument doc;
    doc.sections.push_back({"", {}});
    for (;;) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        const auto l = line_, c = col_;
        get();
        skip_spaces();
        std::string name = bare_key();
        skip_spaces();
        expect(']');
        end_of_line();
        for (const auto& [n, _] : doc.sections)
          if (n == name && !name.empty()) throw ParseError("duplicate section [" + name + "]", l, c);
        doc.sections.push_back({name, {}});
        continue;
      }
      const auto l = line_, c = col_;
      std::string key = bare_key();
      skip_spaces();
      expect('=');
      skip_spaces();
      TomlValue v = value();
      end_of_line();
      auto& entries = doc.sections.back().second;
      for (const auto& e : entries)
        if (e.key == key) throw ParseError("duplicate key '" + key + "'", l, c);
      entries.push_back({std::move(key), std::move(v)});
    }
    return doc;
  }

 private:
  bool eof() const { return i_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[i_]; }
  char get() {
    const char ch = s_[i_++];
    if (ch == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return ch;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }
  void expect(char ch) {
    if (peek() != ch) fail(std::string("expected '") + ch + "'");
    get();
  }
  void skip_spaces() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) get();
  }
  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') get();
  }
  void skip_blank_lines() {
    for (;;) {
      skip_spaces();
      skip_comment();
      if (!eof() && peek() == '\n') {
        get();
        continue;
      }
      return;
    }
  }
  // Whitespace, comments and newlines inside arrays.
  void skip_insignificant() {
    for (;;) {
      skip_spaces();
      skip_comment();
      if (!eof() && peek() == '\n') {
        get();
        continue;
      }
      return;
    }
  }
  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (eof()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    get();
  }
  static bool key_char(char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_' || ch == '-';
  }
  std::string bare_key() {
    std::string k;
    while (!eof() && key_char(peek())) k.push_back(get());
    if (k.empty()) fail("expected a key");
    return k;
  }

  TomlValue value() {
    TomlValue v;
    v.line = line_;
    v.column = col_;
    const char ch = peek();
    if (ch == '"') {
      v.data = string();
    } else if (ch == '[') {
      v.data = array();
    } else if (s_.compare(i_, 4, "true") == 0) {
      for (int k = 0; k < 4; ++k) get();
      v.data = true;
    } else if (s_.compare(i_, 5, "false") == 0) {
      for (int k = 0; k < 5; ++k) get();
      v.data = false;
    } else {
      v.data = number();
    }
    return v;
  }

  std::string string() {
    expect('"');
    std::string out;
    for (;;) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char ch = get();
      if (ch == '"') return out;
      if (ch == '\\') {
        if (eof()) fail("unterminated escape");
        const char e = get();
        switch (e) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      } else {
        out.push_back(ch);
      }
    }
  }

  TomlArray array() {
    expect('[');
    TomlArray out;
    skip_insignificant();
    if (peek() == ']') {
      get();
      return out;
    }
    for (;;) {
      skip_insignificant();
      out.push_back(value());
      skip_insignificant();
      if (peek() == ',') {
        get();
        skip_insignificant();
        if (peek() == ']') {
          get();
          return out;
        }
        continue;
      }
      if (peek() == ']') {
        get();
        return out;
      }
      fail("expected ',' or ']' in array");
    }
  }

  double number() {
    const std::size_t start = i_;
    std::size_t end = i_;
    while (end < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '+' || s_[end] == '-' ||
                               s_[end] == '.' || s_[end] == 'e' || s_[end] == 'E' || s_[end] == '_'))
      ++end;
    std::string token;
    for (std::size_t k = start; k < end; ++k)
      if (s_[k] != '_') token.push_back(s_[k]);
    if (token.empty()) fail("expected a value");
    const char* b = token.data();
    if (*b == '+') ++b;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(b, token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) fail("malformed number '" + token + "'");
    while (i_ < end) get();
    return v;
  }

  const std::string& s_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

inline void format_number(std::ostream& os, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  os << std::string(buf, ec == std::errc{} ? ptr : buf);
}

}  // namespace detail

inline TomlDocument parse_toml(const std::string& text) { return detail::TomlParser(text).parse(); }

inline void write_toml_value(std::ostream& os, const TomlValue& v) {
  if (v.is_number()) {
    detail::format_number(os, std::get<double>(v.data));
  } else if (v.is_bool()) {
    os << (std::get<bool>(v.data) ? "true" : "false");
  } else if (v.is_string()) {
    os << '"';
    for (char ch : std::get<std::string>(v.data)) {
      if (ch == '"' || ch == '\\') os << '\\' << ch;
      else if (ch == '\n') os << "\\n";
      else if (ch == '\t') os << "\\t";
      else os << ch;
    }
    os << '"';
  } else {
    const auto& arr = std::get<TomlArray>(v.data);
    os << '[';
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (i) os << ", ";
      write_toml_value(os, arr[i]);
    }
    os << ']';
  }
}

}  // namespace wfl::experiments
