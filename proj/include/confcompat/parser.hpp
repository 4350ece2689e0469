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

// Line-oriented reader and printer for snapshot files.
//
//   snapshot <int>
//   class <Ident> {
//     const R.attr.<ident> = <int>
//     method <ident>(<ident>,*) {
//       [<Label>:] <stmt>
//     }
//   }
//
// `#` starts a comment. A `const` line may also appear at top level. A label
// may sit alone on a line, in which case it names the next statement.

#include <confcompat/ir.hpp>

#include <cctype>
#include <charconv>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace confcompat {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column)
      : std::runtime_error("line " + std::to_string(line) + ":" + std::to_string(column) + ": " +
                           message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

namespace detail {

struct Token {
  enum class Kind { Ident, Int, Str, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::int64_t value = 0;
  int column = 0;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' || c == '.';
}

inline std::vector<Token> tokenize(std::string_view line, int lineno) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto operand_before = [&] {
    if (out.empty()) return false;
    const auto& t = out.back();
    if (t.kind == Token::Kind::Ident && (t.text == "neg" || t.text == "strEq")) return false;
    return t.kind == Token::Kind::Ident || t.kind == Token::Kind::Int ||
           t.kind == Token::Kind::Str || (t.kind == Token::Kind::Punct && t.text == "]");
  };
  while (i < line.size()) {
    const char c = line[i];
    const int col = static_cast<int>(i) + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '#') break;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < line.size() && ident_char(line[j])) ++j;
      std::string text(line.substr(i, j - i));
      if (text.back() == '.') throw ParseError("identifier ends with '.'", lineno, col);
      out.push_back({Token::Kind::Ident, std::move(text), 0, col});
      i = j;
      continue;
    }
    const bool neg_literal = c == '-' && i + 1 < line.size() &&
                             std::isdigit(static_cast<unsigned char>(line[i + 1])) &&
                             !operand_before();
    if (std::isdigit(static_cast<unsigned char>(c)) || neg_literal) {
      std::size_t j = i + 1;
      while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + j, v);
      if (ec != std::errc() || ptr != line.data() + j)
        throw ParseError("integer literal out of range", lineno, col);
      if (v == kNullValue) throw ParseError("integer literal is reserved", lineno, col);
      out.push_back({Token::Kind::Int, std::string(line.substr(i, j - i)), v, col});
      i = j;
      continue;
    }
    if (c == '"') {
      std::string s;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < line.size()) {
        char d = line[j];
        if (d == '"') {
          closed = true;
          ++j;
          break;
        }
        if (d == '\\' && j + 1 < line.size()) {
          char e = line[j + 1];
          switch (e) {
            case 'n': s += '\n'; break;
            case 't': s += '\t'; break;
            case '"': s += '"'; break;
            case '\\': s += '\\'; break;
            default: throw ParseError("unknown escape sequence", lineno, static_cast<int>(j) + 1);
          }
          j += 2;
          continue;
        }
        s += d;
        ++j;
      }
      if (!closed) throw ParseError("unterminated string literal", lineno, col);
      out.push_back({Token::Kind::Str, std::move(s), 0, col});
      i = j;
      continue;
    }
    static constexpr std::string_view two[] = {"==", "!=", "<=", "&&", "||"};
    bool matched = false;
    for (auto p : two) {
      if (line.substr(i, 2) == p) {
        out.push_back({Token::Kind::Punct, std::string(p), 0, col});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("=(){}[],:+-*/<").find(c) != std::string_view::npos) {
      out.push_back({Token::Kind::Punct, std::string(1, c), 0, col});
      ++i;
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", lineno, col);
  }
  out.push_back({Token::Kind::End, {}, 0, static_cast<int>(line.size()) + 1});
  return out;
}

inline bool is_keyword(std::string_view s) {
  static const std::set<std::string_view> kw = {"snapshot", "class", "const",  "method",
                                                "call",     "strEq", "neg",    "if",
                                                "goto",     "else",  "invoke", "target",
                                                "return",   "null"};
  return kw.count(s) != 0;
}

inline bool is_attr_name(std::string_view s) {
  return s.size() > 7 && s.substr(0, 7) == "R.attr." && s.find('.', 7) == std::string_view::npos;
}

inline std::size_t count_dots(std::string_view s) {
  std::size_t n = 0;
  for (char c : s) n += c == '.';
  return n;
}

class LineParser {
 public:
  LineParser(std::vector<Token> toks, int lineno) : toks_(std::move(toks)), lineno_(lineno) {}

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Token::Kind::Punct && peek(ahead).text == p;
  }
  bool is_word(std::string_view w, std::size_t ahead = 0) const {
    return peek(ahead).kind == Token::Kind::Ident && peek(ahead).text == w;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, lineno_, peek().column); }

  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

  void expect_punct(std::string_view p) {
    if (!is_punct(p)) fail("expected '" + std::string(p) + "'");
    next();
  }
  void expect_word(std::string_view w) {
    if (!is_word(w)) fail("expected '" + std::string(w) + "'");
    next();
  }
  void expect_end() {
    if (!at_end()) fail("unexpected token '" + peek().text + "'");
  }

  std::int64_t integer() {
    if (peek().kind != Token::Kind::Int) fail("expected integer");
    return next().value;
  }

  // Plain identifier: no dots, not a keyword.
  std::string simple_ident(const char* what) {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident || count_dots(t.text) != 0 || is_keyword(t.text))
      fail(std::string("expected ") + what);
    return next().text;
  }

  // API names may be qualified (`XmlPullParser.getName`).
  std::string api_name() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident || is_keyword(t.text)) fail("expected API name");
    return next().text;
  }

  Operand operand() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::Int: return Operand::integer(next().value);
      case Token::Kind::Str: return Operand::str(next().text);
      case Token::Kind::Ident: break;
      default: fail("expected operand");
    }
    if (t.text == "null") {
      next();
      return Operand::null();
    }
    if (is_attr_name(t.text)) return Operand::attr(next().text);
    if (is_keyword(t.text)) fail("unexpected keyword '" + t.text + "'");
    const std::size_t dots = count_dots(t.text);
    if (dots > 1 || t.text.rfind("R.attr", 0) == 0) fail("malformed operand '" + t.text + "'");
    std::string name = next().text;
    if (dots == 0 && is_punct("[")) {
      next();
      Operand idx = operand();
      if (idx.kind != Operand::Kind::Var && idx.kind != Operand::Kind::Int)
        fail("array index must be a variable or integer");
      expect_punct("]");
      return Operand::elem(std::move(name), std::move(idx));
    }
    return Operand::var(std::move(name));
  }

  std::vector<Operand> arg_list() {
    expect_punct("(");
    std::vector<Operand> args;
    if (!is_punct(")")) {
      for (;;) {
        args.push_back(operand());
        if (is_punct(",")) {
          next();
          continue;
        }
        break;
      }
    }
    expect_punct(")");
    return args;
  }

  IrStmt statement() {
    if (is_word("return")) {
      next();
      return ReturnStmt{};
    }
    if (is_word("goto")) {
      next();
      return GotoStmt{simple_ident("label")};
    }
    if (is_word("if")) {
      next();
      BranchStmt b;
      const Token& c = peek();
      if (c.kind != Token::Kind::Ident || is_keyword(c.text) || count_dots(c.text) > 1 ||
          is_attr_name(c.text))
        fail("expected condition variable");
      b.cond = next().text;
      expect_word("goto");
      b.on_true = simple_ident("label");
      expect_word("else");
      expect_word("goto");
      b.on_false = simple_ident("label");
      return b;
    }
    if (is_word("invoke")) {
      next();
      InvokeStmt inv;
      inv.method = api_name();
      inv.args = arg_list();
      return inv;
    }
    if (is_word("target")) {
      next();
      TargetStmt t;
      t.dst = simple_ident("target variable");
      expect_punct("=");
      t.api = api_name();
      t.args = arg_list();
      if (t.args.empty()) fail("target call needs an attribute argument");
      return t;
    }
    // Assignments.
    const Token& lhs = peek();
    if (lhs.kind != Token::Kind::Ident || is_keyword(lhs.text) || is_attr_name(lhs.text))
      fail("unknown statement form");
    const std::size_t dots = count_dots(lhs.text);
    if (dots == 1) {
      std::string full = next().text;
      const auto dot = full.find('.');
      expect_punct("=");
      FieldStoreStmt fs{full.substr(0, dot), full.substr(dot + 1), operand()};
      return fs;
    }
    if (dots > 1) fail("malformed assignment target");
    std::string dst = next().text;
    if (is_punct("[")) {
      next();
      Operand idx = operand();
      if (idx.kind != Operand::Kind::Var && idx.kind != Operand::Kind::Int)
        fail("array index must be a variable or integer");
      expect_punct("]");
      expect_punct("=");
      return ArrayStoreStmt{std::move(dst), std::move(idx), operand()};
    }
    expect_punct("=");
    if (is_word("call")) {
      next();
      ApiAssignStmt a;
      a.dst = std::move(dst);
      a.api = api_name();
      a.args = arg_list();
      return a;
    }
    if (is_word("strEq")) {
      next();
      StrEqAssignStmt s;
      s.dst = std::move(dst);
      s.src = operand();
      if (peek().kind != Token::Kind::Str) fail("expected string literal");
      s.literal = next().text;
      return s;
    }
    if (is_word("neg")) {
      next();
      return CopyStmt{std::move(dst), UnOp::Neg, operand()};
    }
    Operand first = operand();
    if (peek().kind == Token::Kind::Punct && !at_end()) {
      BinOp op;
      if (!parse_binop(peek().text, op)) fail("expected operator");
      next();
      return BinaryStmt{std::move(dst), std::move(first), op, operand()};
    }
    return CopyStmt{std::move(dst), std::nullopt, std::move(first)};
  }

 private:
  std::vector<Token> toks_;
  int lineno_;
  std::size_t pos_ = 0;
};

inline std::vector<std::string> labels_used(const IrStmt& s) {
  if (const auto* g = std::get_if<GotoStmt>(&s)) return {g->label};
  if (const auto* b = std::get_if<BranchStmt>(&s)) return {b->on_true, b->on_false};
  return {};
}

template <typename F>
void for_each_operand(const IrStmt& s, F&& f) {
  auto visit_op = [&](const Operand& o) {
    f(o);
    if (o.index) f(*o.index);
  };
  std::visit(
      [&](const auto& st) {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, CopyStmt>) visit_op(st.src);
        else if constexpr (std::is_same_v<T, BinaryStmt>) {
          visit_op(st.lhs);
          visit_op(st.rhs);
        } else if constexpr (std::is_same_v<T, ApiAssignStmt> || std::is_same_v<T, InvokeStmt> ||
                             std::is_same_v<T, TargetStmt>) {
          for (const auto& a : st.args) visit_op(a);
        } else if constexpr (std::is_same_v<T, FieldStoreStmt>) visit_op(st.value);
        else if constexpr (std::is_same_v<T, ArrayStoreStmt>) {
          visit_op(st.index);
          visit_op(st.value);
        } else if constexpr (std::is_same_v<T, StrEqAssignStmt>) visit_op(st.src);
      },
      s);
}

}  // namespace detail

inline FrameworkSnapshot parse_snapshot(std::string_view text) {
  using detail::LineParser;
  FrameworkSnapshot snap;
  bool have_header = false;
  IrClass* cls = nullptr;
  IrMethod* method = nullptr;
  std::optional<std::string> pending_label;
  int pending_label_line = 0;
  std::set<std::int64_t> attr_ids;
  std::set<std::string> class_names, method_names, labels;
  struct AttrUse {
    std::string name;
    int line;
  };
  std::vector<AttrUse> attr_uses;
  struct LabelUse {
    std::string label;
    int line;
    int column;
  };
  std::vector<LabelUse> label_uses;

  auto finish_method = [&](int lineno) {
    if (pending_label) throw ParseError("label '" + *pending_label + "' names no statement",
                                       pending_label_line, 1);
    for (const auto& use : label_uses)
      if (!labels.count(use.label))
        throw ParseError("undefined label '" + use.label + "'", use.line, use.column);
    label_uses.clear();
    labels.clear();
    (void)lineno;
  };

  int lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

    LineParser p(detail::tokenize(raw, lineno), lineno);
    if (p.at_end()) {
      if (end == text.size()) break;
      continue;
    }

    if (!have_header) {
      p.expect_word("snapshot");
      const std::int64_t level = p.integer();
      if (level < 1 || level > 100000) p.fail("API level must be a positive integer");
      p.expect_end();
      snap.api_level = static_cast<int>(level);
      have_header = true;
      continue;
    }

    if (p.is_word("const") && method == nullptr) {
      p.next();
      const auto& t = p.peek();
      if (t.kind != detail::Token::Kind::Ident || !detail::is_attr_name(t.text))
        p.fail("expected R.attr.<name>");
      std::string name = p.next().text;
      p.expect_punct("=");
      const std::int64_t id = p.integer();
      p.expect_end();
      if (snap.attr_consts.count(name)) p.fail("duplicate attribute constant '" + name + "'");
      if (!attr_ids.insert(id).second)
        p.fail("attribute id " + std::to_string(id) + " already in use");
      snap.attr_consts.emplace(std::move(name), id);
      continue;
    }

    if (cls == nullptr) {
      p.expect_word("class");
      IrClass c;
      c.name = p.simple_ident("class name");
      p.expect_punct("{");
      p.expect_end();
      if (!class_names.insert(c.name).second) p.fail("duplicate class '" + c.name + "'");
      snap.classes.push_back(std::move(c));
      cls = &snap.classes.back();
      method_names.clear();
      continue;
    }

    if (method == nullptr) {
      if (p.is_punct("}")) {
        p.next();
        p.expect_end();
        cls = nullptr;
        continue;
      }
      p.expect_word("method");
      IrMethod m;
      m.name = p.simple_ident("method name");
      p.expect_punct("(");
      std::set<std::string> seen;
      if (!p.is_punct(")")) {
        for (;;) {
          m.params.push_back(p.simple_ident("parameter name"));
          if (!seen.insert(m.params.back()).second) p.fail("duplicate parameter");
          if (p.is_punct(",")) {
            p.next();
            continue;
          }
          break;
        }
      }
      p.expect_punct(")");
      p.expect_punct("{");
      p.expect_end();
      if (!method_names.insert(m.name).second) p.fail("duplicate method '" + m.name + "'");
      cls->methods.push_back(std::move(m));
      method = &cls->methods.back();
      continue;
    }

    if (p.is_punct("}")) {
      p.next();
      p.expect_end();
      finish_method(lineno);
      method = nullptr;
      continue;
    }

    std::optional<std::string> label;
    if (p.peek().kind == detail::Token::Kind::Ident && p.is_punct(":", 1)) {
      if (pending_label) p.fail("two labels on one statement");
      label = p.simple_ident("label");
      p.next();
      if (!labels.insert(*label).second) {
        throw ParseError("duplicate label '" + *label + "'", lineno, 1);
      }
      if (p.at_end()) {
        pending_label = label;
        pending_label_line = lineno;
        continue;
      }
    } else if (pending_label) {
      label = pending_label;
    }
    pending_label.reset();

    const int stmt_col = p.peek().column;
    IrStmt stmt = p.statement();
    p.expect_end();
    for (auto& l : detail::labels_used(stmt)) label_uses.push_back({l, lineno, stmt_col});
    detail::for_each_operand(stmt, [&](const Operand& o) {
      if (o.kind == Operand::Kind::Attr) attr_uses.push_back({o.name, lineno});
    });
    method->body.push_back(IrLine{std::move(label), std::move(stmt), lineno});
  }

  if (!have_header) throw ParseError("missing 'snapshot <level>' header", lineno, 1);
  if (method != nullptr) throw ParseError("unterminated method '" + method->name + "'", lineno, 1);
  if (cls != nullptr) throw ParseError("unterminated class '" + cls->name + "'", lineno, 1);
  for (const auto& use : attr_uses)
    if (!snap.attr_consts.count(use.name))
      throw ParseError("undeclared attribute constant '" + use.name + "'", use.line, 1);
  return snap;
}

namespace detail {

inline std::string join_args(const std::vector<Operand>& args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += to_string(args[i]);
  }
  return out;
}

}  // namespace detail

inline std::string to_string(const IrStmt& s) {
  using detail::join_args;
  return std::visit(
      [](const auto& st) -> std::string {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, CopyStmt>) {
          return st.dst + " = " + (st.op ? "neg " : "") + to_string(st.src);
        } else if constexpr (std::is_same_v<T, BinaryStmt>) {
          return st.dst + " = " + to_string(st.lhs) + " " + std::string(to_string(st.op)) + " " +
                 to_string(st.rhs);
        } else if constexpr (std::is_same_v<T, ApiAssignStmt>) {
          return st.dst + " = call " + st.api + "(" + join_args(st.args) + ")";
        } else if constexpr (std::is_same_v<T, FieldStoreStmt>) {
          return st.object + "." + st.field + " = " + to_string(st.value);
        } else if constexpr (std::is_same_v<T, ArrayStoreStmt>) {
          return st.array + "[" + to_string(st.index) + "] = " + to_string(st.value);
        } else if constexpr (std::is_same_v<T, StrEqAssignStmt>) {
          return st.dst + " = strEq " + to_string(st.src) + " " + quote(st.literal);
        } else if constexpr (std::is_same_v<T, BranchStmt>) {
          return "if " + st.cond + " goto " + st.on_true + " else goto " + st.on_false;
        } else if constexpr (std::is_same_v<T, GotoStmt>) {
          return "goto " + st.label;
        } else if constexpr (std::is_same_v<T, InvokeStmt>) {
          return "invoke " + st.method + "(" + join_args(st.args) + ")";
        } else if constexpr (std::is_same_v<T, TargetStmt>) {
          return "target " + st.dst + " = " + st.api + "(" + join_args(st.args) + ")";
        } else {
          return "return";
        }
      },
      s);
}

inline std::string print_snapshot(const FrameworkSnapshot& snap) {
  std::ostringstream os;
  os << "snapshot " << snap.api_level << "\n";
  for (const auto& [name, id] : snap.attr_consts) os << "const " << name << " = " << id << "\n";
  for (const auto& cls : snap.classes) {
    os << "class " << cls.name << " {\n";
    for (const auto& m : cls.methods) {
      os << "  method " << m.name << "(";
      for (std::size_t i = 0; i < m.params.size(); ++i) os << (i ? ", " : "") << m.params[i];
      os << ") {\n";
      for (const auto& line : m.body) {
        os << "    ";
        if (line.label) os << *line.label << ": ";
        os << to_string(line.stmt) << "\n";
      }
      os << "  }\n";
    }
    os << "}\n";
  }
  return os.str();
}

}  // namespace confcompat
