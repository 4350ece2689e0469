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

// Three-address IR for framework snapshots. One statement kind per symbolic
// transformer row plus plain control flow (goto, branch, invoke, return).

#include <confcompat/value.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

namespace confcompat {

// An instruction operand. Field reads (`o.f`) are modelled as variables whose
// name contains the dot; `a[i]` reads are Elem operands with a var/int index.
struct Operand {
  enum class Kind { Var, Int, Str, Attr, Null, Elem };

  Kind kind = Kind::Null;
  std::string name;  // Var / Attr name, Str contents, Elem array name
  std::int64_t value = 0;
  std::shared_ptr<const Operand> index;  // Elem only

  static Operand var(std::string n) { return {Kind::Var, std::move(n), 0, nullptr}; }
  static Operand integer(std::int64_t v) { return {Kind::Int, {}, v, nullptr}; }
  static Operand str(std::string s) { return {Kind::Str, std::move(s), 0, nullptr}; }
  static Operand attr(std::string n) { return {Kind::Attr, std::move(n), 0, nullptr}; }
  static Operand null() { return {Kind::Null, {}, 0, nullptr}; }
  static Operand elem(std::string array, Operand idx) {
    return {Kind::Elem, std::move(array), 0, std::make_shared<const Operand>(std::move(idx))};
  }

  friend bool operator==(const Operand& a, const Operand& b) {
    if (a.kind != b.kind || a.name != b.name || a.value != b.value) return false;
    if (!a.index || !b.index) return !a.index && !b.index;
    return *a.index == *b.index;
  }
};

std::string to_string(const Operand& op);

// x = y  |  x = neg y
struct CopyStmt {
  std::string dst;
  std::optional<UnOp> op;
  Operand src;
  friend bool operator==(const CopyStmt&, const CopyStmt&) = default;
};

// x = y op z
struct BinaryStmt {
  std::string dst;
  Operand lhs;
  BinOp op = BinOp::Add;
  Operand rhs;
  friend bool operator==(const BinaryStmt&, const BinaryStmt&) = default;
};

// x = call api(args)
struct ApiAssignStmt {
  std::string dst;
  std::string api;
  std::vector<Operand> args;
  friend bool operator==(const ApiAssignStmt&, const ApiAssignStmt&) = default;
};

// o.f = z
struct FieldStoreStmt {
  std::string object;
  std::string field;
  Operand value;
  friend bool operator==(const FieldStoreStmt&, const FieldStoreStmt&) = default;
};

// a[i] = x
struct ArrayStoreStmt {
  std::string array;
  Operand index;
  Operand value;
  friend bool operator==(const ArrayStoreStmt&, const ArrayStoreStmt&) = default;
};

// x = strEq y "lit"; string equality is an operator, not an opaque API.
struct StrEqAssignStmt {
  std::string dst;
  Operand src;
  std::string literal;
  friend bool operator==(const StrEqAssignStmt&, const StrEqAssignStmt&) = default;
};

struct BranchStmt {
  std::string cond;
  std::string on_true;
  std::string on_false;
  friend bool operator==(const BranchStmt&, const BranchStmt&) = default;
};

struct GotoStmt {
  std::string label;
  friend bool operator==(const GotoStmt&, const GotoStmt&) = default;
};

struct InvokeStmt {
  std::string method;
  std::vector<Operand> args;
  friend bool operator==(const InvokeStmt&, const InvokeStmt&) = default;
};

// target x = confapi(attr, extras...); the first argument names the attribute.
struct TargetStmt {
  std::string dst;
  std::string api;
  std::vector<Operand> args;
  friend bool operator==(const TargetStmt&, const TargetStmt&) = default;
};

struct ReturnStmt {
  friend bool operator==(const ReturnStmt&, const ReturnStmt&) = default;
};

using IrStmt = std::variant<CopyStmt, BinaryStmt, ApiAssignStmt, FieldStoreStmt, ArrayStoreStmt,
                            StrEqAssignStmt, BranchStmt, GotoStmt, InvokeStmt, TargetStmt,
                            ReturnStmt>;

struct IrLine {
  std::optional<std::string> label;
  IrStmt stmt;
  int source_line = 0;  // not part of structural equality

  friend bool operator==(const IrLine& a, const IrLine& b) {
    return a.label == b.label && a.stmt == b.stmt;
  }
};

struct IrMethod {
  std::string name;
  std::vector<std::string> params;
  std::vector<IrLine> body;

  std::optional<std::size_t> label_index(const std::string& label) const {
    for (std::size_t i = 0; i < body.size(); ++i)
      if (body[i].label && *body[i].label == label) return i;
    return std::nullopt;
  }

  friend bool operator==(const IrMethod&, const IrMethod&) = default;
};

struct IrClass {
  std::string name;
  std::vector<IrMethod> methods;

  const IrMethod* find_method(const std::string& m) const {
    for (const auto& method : methods)
      if (method.name == m) return &method;
    return nullptr;
  }
  std::optional<std::size_t> method_index(const std::string& m) const {
    for (std::size_t i = 0; i < methods.size(); ++i)
      if (methods[i].name == m) return i;
    return std::nullopt;
  }

  friend bool operator==(const IrClass&, const IrClass&) = default;
};

struct FrameworkSnapshot {
  int api_level = 1;
  std::vector<IrClass> classes;
  // "R.attr.color" -> id. Declared inside class bodies, snapshot-wide scope.
  std::map<std::string, std::int64_t> attr_consts;

  const IrClass* find_class(const std::string& c) const {
    for (const auto& cls : classes)
      if (cls.name == c) return &cls;
    return nullptr;
  }

  std::optional<std::string> attr_name_for(std::int64_t id) const {
    for (const auto& [name, value] : attr_consts)
      if (value == id) return name;
    return std::nullopt;
  }

  friend bool operator==(const FrameworkSnapshot&, const FrameworkSnapshot&) = default;
};

// Location of a statement inside a snapshot.
struct StmtRef {
  std::size_t cls = 0;
  std::size_t method = 0;
  std::size_t index = 0;
  friend auto operator<=>(const StmtRef&, const StmtRef&) = default;
};

inline std::vector<StmtRef> list_target_statements(const FrameworkSnapshot& snap) {
  std::vector<StmtRef> out;
  for (std::size_t c = 0; c < snap.classes.size(); ++c) {
    const auto& cls = snap.classes[c];
    for (std::size_t m = 0; m < cls.methods.size(); ++m) {
      const auto& body = cls.methods[m].body;
      for (std::size_t i = 0; i < body.size(); ++i)
        if (std::holds_alternative<TargetStmt>(body[i].stmt)) out.push_back({c, m, i});
    }
  }
  return out;
}

inline std::string to_string(const Operand& op) {
  switch (op.kind) {
    case Operand::Kind::Var: return op.name;
    case Operand::Kind::Int: return std::to_string(op.value);
    case Operand::Kind::Str: return quote(op.name);
    case Operand::Kind::Attr: return op.name;
    case Operand::Kind::Null: return "null";
    case Operand::Kind::Elem: return op.name + "[" + to_string(*op.index) + "]";
  }
  return "?";
}

}  // namespace confcompat
