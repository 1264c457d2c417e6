/**
 * @file kv_parser.hpp
 * @brief Sectioned key-value scene text (a TOML subset) parsed into a JSON tree.
 *
 * Supported: comments, [section] and [a.b] headers, key = value, strings with
 * basic escapes, integers, floats, booleans, arrays and inline tables (both may
 * span lines). Not supported: dates, multi-line strings, dotted keys, [[arrays]].
 */
#ifndef CASIMIR_IO_KV_PARSER_HPP
#define CASIMIR_IO_KV_PARSER_HPP

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "../error.hpp"

namespace casimir::io {

using Json = nlohmann::ordered_json;

struct KvDocument {
  Json root = Json::object();
  std::map<std::string, int> lines;  // "section.key" -> line of definition
  std::string source = "<string>";

  /// "file:line" context for a dotted key path, or just the source if unknown.
  std::string where(const std::string& path) const {
    auto it = lines.find(path);
    return it == lines.end() ? source : source + ":" + std::to_string(it->second);
  }
};

namespace detail {

class KvParser {
 public:
  KvParser(const std::string& text, std::string source) : s_(text), src_(std::move(source)) {}

  KvDocument parse() {
    KvDocument doc;
    doc.source = src_;
    Json* table = &doc.root;
    std::string prefix;
    while (true) {
      skip_ws_nl();
      if (eof()) break;
      if (peek() == '[') {
        ++i_;
        skip_inline_ws();
        std::string name = bare_key();
        while (peek() == '.') {
          ++i_;
          name += "." + bare_key();
        }
        skip_inline_ws();
        expect(']');
        end_of_line();
        table = &doc.root;
        std::string path;
        std::istringstream parts(name);
        for (std::string part; std::getline(parts, part, '.');) {
          path = path.empty() ? part : path + "." + part;
          if (!table->contains(part)) {
            (*table)[part] = Json::object();
            doc.lines[path] = line_;
          } else if (!(*table)[part].is_object()) {
            fail("'" + path + "' is already a value, not a section");
          }
          table = &(*table)[part];
        }
        if (seen_sections_.count(name)) fail("duplicate section [" + name + "]");
        seen_sections_.insert({name, line_});
        prefix = name;
        continue;
      }
      const int key_line = line_;
      const std::string key = bare_key();
      skip_inline_ws();
      expect('=');
      skip_inline_ws();
      if (table->contains(key)) fail("duplicate key '" + key + "'");
      (*table)[key] = value();
      doc.lines[prefix.empty() ? key : prefix + "." + key] = key_line;
      end_of_line();
    }
    return doc;
  }

 private:
  const std::string& s_;
  std::string src_;
  std::size_t i_ = 0;
  int line_ = 1;
  std::map<std::string, int> seen_sections_;

  bool eof() const { return i_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[i_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError(src_ + ":" + std::to_string(line_) + ": " + msg);
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }

  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++i_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++i_;
  }

  // Whitespace, newlines and comments (inside arrays, tables, and between statements).
  void skip_ws_nl() {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') ++i_;
      else if (c == '\n') {
        ++i_;
        ++line_;
      } else if (c == '#') skip_comment();
      else break;
    }
  }

  void end_of_line() {
    skip_inline_ws();
    skip_comment();
    if (peek() == '\r') ++i_;
    if (eof()) return;
    if (peek() != '\n') fail("unexpected text after value");
    ++i_;
    ++line_;
  }

  std::string bare_key() {
    const std::size_t start = i_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++i_;
    if (i_ == start) fail("expected a key");
    return s_.substr(start, i_ - start);
  }

  Json value() {
    const char c = peek();
    if (c == '"') return string_value();
    if (c == '[') return array_value();
    if (c == '{') return table_value();
    if (s_.compare(i_, 4, "true") == 0) {
      i_ += 4;
      return true;
    }
    if (s_.compare(i_, 5, "false") == 0) {
      i_ += 5;
      return false;
    }
    return number_value();
  }

  Json string_value() {
    ++i_;
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = s_[i_++];
      if (c == '"') break;
      if (c == '\\') {
        if (eof()) fail("unterminated string");
        const char e = s_[i_++];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: fail(std::string("unsupported escape '\\") + e + "'");
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  Json number_value() {
    const std::size_t start = i_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' || peek() == '.'))
      ++i_;
    const std::string tok = s_.substr(start, i_ - start);
    if (tok.empty()) fail("expected a value");
    const bool integral = tok.find_first_of(".eE") == std::string::npos;
    try {
      std::size_t used = 0;
      if (integral) {
        const long long v = std::stoll(tok, &used);
        if (used == tok.size()) return v;
      } else {
        const double v = std::stod(tok, &used);
        if (used == tok.size() && std::isfinite(v)) return v;
      }
    } catch (const std::exception&) {
    }
    fail("invalid value '" + tok + "'");
  }

  Json array_value() {
    ++i_;
    Json arr = Json::array();
    while (true) {
      skip_ws_nl();
      if (peek() == ']') {
        ++i_;
        return arr;
      }
      arr.push_back(value());
      skip_ws_nl();
      if (peek() == ',') {
        ++i_;
        continue;
      }
      if (peek() != ']') fail("expected ',' or ']' in array");
    }
  }

  Json table_value() {
    ++i_;
    Json t = Json::object();
    while (true) {
      skip_ws_nl();
      if (peek() == '}') {
        ++i_;
        return t;
      }
      const std::string key = bare_key();
      skip_inline_ws();
      expect('=');
      skip_ws_nl();
      if (t.contains(key)) fail("duplicate key '" + key + "' in inline table");
      t[key] = value();
      skip_ws_nl();
      if (peek() == ',') {
        ++i_;
        continue;
      }
      if (peek() != '}') fail("expected ',' or '}' in inline table");
    }
  }
};

}  // namespace detail

inline KvDocument parse_kv(const std::string& text, const std::string& source = "<string>") {
  return detail::KvParser(text, source).parse();
}

inline KvDocument parse_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scene file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_kv(ss.str(), path);
}

}  // namespace casimir::io

#endif
