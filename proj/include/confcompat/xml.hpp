// Copyright (C) 2026 The confcompat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Small namespace-aware XML reader that keeps source lines.
// Handles elements, attributes, comments, processing instructions, CDATA,
// a skipped DOCTYPE and the predefined and numeric character references.
// Text content is discarded.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace confcompat::xml {

class XmlError : public std::runtime_error {
 public:
  XmlError(const std::string& msg, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct Attribute {
  std::string qname;
  std::string prefix;
  std::string local;
  std::string ns;  // resolved namespace URI, empty if none
  std::string value;
  int line = 0;
};

struct Element {
  std::string qname;
  std::string prefix;
  std::string local;
  std::string ns;
  std::vector<Attribute> attributes;
  std::vector<Element> children;
  int line = 0;

  const Attribute* find_attribute(std::string_view ns_uri, std::string_view local_name) const {
    for (const auto& a : attributes)
      if (a.ns == ns_uri && a.local == local_name) return &a;
    return nullptr;
  }
};

template <typename F>
void for_each_element(const Element& e, F&& f) {
  f(e);
  for (const auto& c : e.children) for_each_element(c, f);
}

namespace detail {

inline bool is_name_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == ':' ||
         static_cast<unsigned char>(c) >= 0x80;
}
inline bool is_name_char(char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view src) : s_(src) {}

  Element document() {
    std::optional<Element> root;
    for (;;) {
      skip_space();
      if (eof()) break;
      if (starts("<?")) {
        skip_past("?>", "processing instruction");
      } else if (starts("<!--")) {
        skip_past("-->", "comment");
      } else if (starts("<!DOCTYPE")) {
        skip_doctype();
      } else if (peek() == '<') {
        if (root) fail("more than one root element");
        std::vector<std::map<std::string, std::string>> scopes;
        root = element(scopes);
      } else {
        fail("text outside the root element");
      }
    }
    if (!root) fail("no root element");
    return std::move(*root);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw XmlError(msg, line_); }

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }
  bool starts(std::string_view p) const { return s_.substr(pos_, p.size()) == p; }
  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < s_.size(); ++i)
      if (s_[pos_++] == '\n') ++line_;
  }
  void skip_space() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r')) advance();
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    advance();
  }
  void skip_past(std::string_view end, const char* what) {
    const int start = line_;
    auto at = s_.find(end, pos_);
    if (at == std::string_view::npos) throw XmlError(std::string("unterminated ") + what, start);
    advance(at + end.size() - pos_);
  }
  void skip_doctype() {
    int depth = 0;
    while (!eof()) {
      char c = peek();
      advance();
      if (c == '[') ++depth;
      if (c == ']') --depth;
      if (c == '>' && depth <= 0) return;
    }
    fail("unterminated DOCTYPE");
  }

  std::string name() {
    if (!is_name_start(peek())) fail("expected a name");
    std::size_t b = pos_;
    while (!eof() && is_name_char(peek())) advance();
    return std::string(s_.substr(b, pos_ - b));
  }

  std::string attr_value() {
    char q = peek();
    if (q != '"' && q != '\'') fail("attribute value must be quoted");
    advance();
    std::string out;
    for (;;) {
      if (eof()) fail("unterminated attribute value");
      char c = peek();
      if (c == q) break;
      if (c == '<') fail("'<' in attribute value");
      if (c == '&') {
        out += reference();
        continue;
      }
      out += c;
      advance();
    }
    advance();
    return out;
  }

  std::string reference() {
    auto semi = s_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) fail("malformed character reference");
    std::string_view ref = s_.substr(pos_ + 1, semi - pos_ - 1);
    std::string out;
    if (ref == "amp") out = "&";
    else if (ref == "lt") out = "<";
    else if (ref == "gt") out = ">";
    else if (ref == "quot") out = "\"";
    else if (ref == "apos") out = "'";
    else if (!ref.empty() && ref[0] == '#') {
      std::uint32_t cp = 0;
      bool hex = ref.size() > 1 && (ref[1] == 'x' || ref[1] == 'X');
      std::string_view digits = ref.substr(hex ? 2 : 1);
      if (digits.empty()) fail("malformed character reference");
      for (char d : digits) {
        int v;
        if (d >= '0' && d <= '9') v = d - '0';
        else if (hex && d >= 'a' && d <= 'f') v = d - 'a' + 10;
        else if (hex && d >= 'A' && d <= 'F') v = d - 'A' + 10;
        else fail("malformed character reference");
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
        if (cp > 0x10FFFF) fail("character reference out of range");
      }
      append_utf8(out, cp);
    } else {
      fail("unknown entity '" + std::string(ref) + "'");
    }
    advance(semi + 1 - pos_);
    return out;
  }

  static void split(const std::string& qname, std::string& prefix, std::string& local) {
    auto c = qname.find(':');
    if (c == std::string::npos) {
      prefix.clear();
      local = qname;
    } else {
      prefix = qname.substr(0, c);
      local = qname.substr(c + 1);
    }
  }

  std::optional<std::string> resolve(const std::vector<std::map<std::string, std::string>>& scopes,
                                     const std::string& prefix) const {
    if (prefix == "xml") return std::string("http://www.w3.org/XML/1998/namespace");
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
      auto f = it->find(prefix);
      if (f != it->end()) return f->second;
    }
    if (prefix.empty()) return std::string();
    return std::nullopt;
  }

  Element element(std::vector<std::map<std::string, std::string>>& scopes) {
    Element e;
    e.line = line_;
    expect('<');
    e.qname = name();
    split(e.qname, e.prefix, e.local);

    std::map<std::string, std::string> decls;
    for (;;) {
      const bool spaced = peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r';
      skip_space();
      if (peek() == '/' || peek() == '>') break;
      if (!spaced) fail("expected whitespace before attribute");
      Attribute a;
      a.line = line_;
      a.qname = name();
      skip_space();
      expect('=');
      skip_space();
      a.value = attr_value();
      for (const auto& other : e.attributes)
        if (other.qname == a.qname) fail("duplicate attribute '" + a.qname + "'");
      split(a.qname, a.prefix, a.local);
      if (a.qname == "xmlns") decls[""] = a.value;
      else if (a.prefix == "xmlns") decls[a.local] = a.value;
      e.attributes.push_back(std::move(a));
    }
    scopes.push_back(std::move(decls));

    auto ns_of = [&](const std::string& prefix) {
      auto r = resolve(scopes, prefix);
      if (!r) fail("undeclared namespace prefix '" + prefix + "'");
      return *r;
    };
    e.ns = ns_of(e.prefix);
    for (auto& a : e.attributes) {
      if (a.qname == "xmlns" || a.prefix == "xmlns") {
        a.ns = "http://www.w3.org/2000/xmlns/";
      } else if (!a.prefix.empty()) {
        a.ns = ns_of(a.prefix);  // unprefixed attributes take no namespace
      }
    }

    if (starts("/>")) {
      advance(2);
      scopes.pop_back();
      return e;
    }
    expect('>');
    for (;;) {
      if (eof()) fail("unterminated element <" + e.qname + ">");
      if (starts("</")) {
        advance(2);
        std::string closing = name();
        if (closing != e.qname) fail("mismatched closing tag </" + closing + "> for <" + e.qname + ">");
        skip_space();
        expect('>');
        break;
      }
      if (starts("<!--")) {
        skip_past("-->", "comment");
      } else if (starts("<![CDATA[")) {
        skip_past("]]>", "CDATA section");
      } else if (starts("<?")) {
        skip_past("?>", "processing instruction");
      } else if (peek() == '<') {
        e.children.push_back(element(scopes));
      } else if (peek() == '&') {
        reference();
      } else {
        advance();
      }
    }
    scopes.pop_back();
    return e;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace detail

inline Element parse(std::string_view text) { return detail::Reader(text).document(); }

}  // namespace confcompat::xml
