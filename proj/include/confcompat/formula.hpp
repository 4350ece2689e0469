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

// Immutable terms and formulas for backward symbolic states.
//
// Terms are value expressions over the state at a program point. API calls
// are uninterpreted: two calls are the same value iff their terms are
// structurally identical. Formulas are built through smart constructors that
// only flatten, absorb True/False, fold ground predicates and drop duplicate
// children; no other logical rewriting happens here.

#include <confcompat/ir.hpp>
#include <confcompat/value.hpp>

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

namespace confcompat {

enum class TermKind { Var, Int, Str, Attr, Null, Api, Unary, Binary, StrEq, Elem, Ite };

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

struct TermNode {
  TermKind kind;
  std::string name;       // Var/Attr/Api/Elem name, Str value, StrEq literal
  std::int64_t value = 0;  // Int
  BinOp bop = BinOp::Add;
  std::vector<Term> args;  // Api args; Unary[1]; Binary[2]; StrEq[1]; Elem[1]=index; Ite[3]
  std::string key;         // canonical prefix rendering, computed once
  bool ground = true;      // no Var/Api/Elem/Attr below
};

namespace detail {

inline Term make_term(TermKind kind, std::string name, std::int64_t value, BinOp bop,
                      std::vector<Term> args) {
  auto n = std::make_shared<TermNode>();
  n->kind = kind;
  n->name = std::move(name);
  n->value = value;
  n->bop = bop;
  n->args = std::move(args);
  std::string& k = n->key;
  switch (kind) {
    case TermKind::Var: k = n->name; break;
    case TermKind::Int: k = value == kNullValue ? "null" : std::to_string(value); break;
    case TermKind::Str: k = quote(n->name); break;
    case TermKind::Attr: k = n->name; break;
    case TermKind::Null: k = "null"; break;
    case TermKind::Api: k = "(call " + n->name; break;
    case TermKind::Unary: k = "(neg"; break;
    case TermKind::Binary: k = "(" + std::string(to_string(bop)); break;
    case TermKind::StrEq: k = "(strEq"; break;
    case TermKind::Elem: k = "(elem " + n->name; break;
    case TermKind::Ite: k = "(ite"; break;
  }
  if (kind >= TermKind::Api) {
    for (const auto& a : n->args) k += " " + a->key;
    if (kind == TermKind::StrEq) k += " " + quote(n->name);
    k += ")";
  }
  n->ground = !(kind == TermKind::Var || kind == TermKind::Api || kind == TermKind::Elem ||
                kind == TermKind::Attr);
  for (const auto& a : n->args) n->ground = n->ground && a->ground;
  return n;
}

}  // namespace detail

namespace term {
inline Term var(std::string name) { return detail::make_term(TermKind::Var, std::move(name), 0, {}, {}); }
inline Term integer(std::int64_t v) { return detail::make_term(TermKind::Int, {}, v, {}, {}); }
inline Term str(std::string s) { return detail::make_term(TermKind::Str, std::move(s), 0, {}, {}); }
inline Term attr(std::string n) { return detail::make_term(TermKind::Attr, std::move(n), 0, {}, {}); }
inline Term null() { return detail::make_term(TermKind::Null, {}, 0, {}, {}); }
inline Term api(std::string n, std::vector<Term> args) {
  return detail::make_term(TermKind::Api, std::move(n), 0, {}, std::move(args));
}
inline Term neg(Term t) { return detail::make_term(TermKind::Unary, {}, 0, {}, {std::move(t)}); }
inline Term binary(BinOp op, Term a, Term b) {
  return detail::make_term(TermKind::Binary, {}, 0, op, {std::move(a), std::move(b)});
}
inline Term str_eq(Term t, std::string literal) {
  return detail::make_term(TermKind::StrEq, std::move(literal), 0, {}, {std::move(t)});
}
inline Term elem(std::string array, Term index) {
  return detail::make_term(TermKind::Elem, std::move(array), 0, {}, {std::move(index)});
}
inline Term ite(Term c, Term t, Term e) {
  return detail::make_term(TermKind::Ite, {}, 0, {}, {std::move(c), std::move(t), std::move(e)});
}

inline Term from_operand(const Operand& op) {
  switch (op.kind) {
    case Operand::Kind::Var: return var(op.name);
    case Operand::Kind::Int: return integer(op.value);
    case Operand::Kind::Str: return str(op.name);
    case Operand::Kind::Attr: return attr(op.name);
    case Operand::Kind::Null: return null();
    case Operand::Kind::Elem: return elem(op.name, from_operand(*op.index));
  }
  return null();
}
}  // namespace term

inline bool same(const Term& a, const Term& b) { return a == b || a->key == b->key; }

// The configuration-API call a path constraint leads to.
struct TargetAtom {
  std::string api;
  Term attribute;
  std::vector<Term> extras;
  std::string site;  // "Class.method#index"
};

enum class FormulaKind { True, False, And, Or, Not, Pred, Target };

struct FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

struct FormulaNode {
  FormulaKind kind;
  std::vector<Formula> children;  // And/Or/Not
  Term pred;                      // Pred: boolean-valued term (comparison, strEq, variable, ...)
  std::shared_ptr<const TargetAtom> target;
  std::string key;
};

namespace detail {
inline Formula make_formula(FormulaKind kind, std::vector<Formula> children, Term pred,
                            std::shared_ptr<const TargetAtom> target) {
  auto n = std::make_shared<FormulaNode>();
  n->kind = kind;
  n->children = std::move(children);
  n->pred = std::move(pred);
  n->target = std::move(target);
  std::string& k = n->key;
  switch (kind) {
    case FormulaKind::True: k = "true"; break;
    case FormulaKind::False: k = "false"; break;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Not:
      k = kind == FormulaKind::And ? "(and" : kind == FormulaKind::Or ? "(or" : "(not";
      for (const auto& c : n->children) k += " " + c->key;
      k += ")";
      break;
    case FormulaKind::Pred: k = "(pred " + n->pred->key + ")"; break;
    case FormulaKind::Target:
      k = "(target " + n->target->api + " " + n->target->attribute->key;
      for (const auto& e : n->target->extras) k += " " + e->key;
      k += " @" + n->target->site + ")";
      break;
  }
  return n;
}

Value eval_ground(const Term& t);
}  // namespace detail

namespace formula {

inline Formula truth() {
  static const Formula t = detail::make_formula(FormulaKind::True, {}, nullptr, nullptr);
  return t;
}
inline Formula falsity() {
  static const Formula f = detail::make_formula(FormulaKind::False, {}, nullptr, nullptr);
  return f;
}

inline Formula pred(Term t) {
  if (t->ground) return truthy(detail::eval_ground(t)) ? truth() : falsity();
  return detail::make_formula(FormulaKind::Pred, {}, std::move(t), nullptr);
}

inline Formula target(TargetAtom atom) {
  return detail::make_formula(FormulaKind::Target, {}, nullptr,
                              std::make_shared<const TargetAtom>(std::move(atom)));
}

inline Formula negate(Formula f) {
  if (f->kind == FormulaKind::True) return falsity();
  if (f->kind == FormulaKind::False) return truth();
  if (f->kind == FormulaKind::Not) return f->children[0];
  return detail::make_formula(FormulaKind::Not, {std::move(f)}, nullptr, nullptr);
}

namespace detail {
inline Formula junction(FormulaKind kind, const std::vector<Formula>& parts) {
  const FormulaKind unit = kind == FormulaKind::And ? FormulaKind::True : FormulaKind::False;
  const FormulaKind zero = kind == FormulaKind::And ? FormulaKind::False : FormulaKind::True;
  std::vector<Formula> flat;
  std::unordered_set<std::string> seen;
  auto add = [&](const Formula& f) {
    if (seen.insert(f->key).second) flat.push_back(f);
  };
  for (const auto& p : parts) {
    if (p->kind == zero) return zero == FormulaKind::True ? truth() : falsity();
    if (p->kind == unit) continue;
    if (p->kind == kind) {
      for (const auto& c : p->children) add(c);
    } else {
      add(p);
    }
  }
  if (flat.empty()) return unit == FormulaKind::True ? truth() : falsity();
  if (flat.size() == 1) return flat.front();
  return confcompat::detail::make_formula(kind, std::move(flat), nullptr, nullptr);
}
}  // namespace detail

inline Formula conj(const std::vector<Formula>& parts) { return detail::junction(FormulaKind::And, parts); }
inline Formula disj(const std::vector<Formula>& parts) { return detail::junction(FormulaKind::Or, parts); }
inline Formula conj(Formula a, Formula b) { return conj(std::vector<Formula>{std::move(a), std::move(b)}); }
inline Formula disj(Formula a, Formula b) { return disj(std::vector<Formula>{std::move(a), std::move(b)}); }

}  // namespace formula

// ---------------------------------------------------------------------------
// Traversal and rewriting

// Bottom-up term rewriter. `leaf` is consulted on every node before its
// children are rewritten; returning a term replaces the node wholesale.
using TermRewrite = std::function<std::optional<Term>(const Term&)>;

inline Term rewrite(const Term& t, const TermRewrite& leaf) {
  if (auto r = leaf(t)) return *r;
  if (t->args.empty()) return t;
  std::vector<Term> args;
  args.reserve(t->args.size());
  bool changed = false;
  for (const auto& a : t->args) {
    args.push_back(rewrite(a, leaf));
    changed = changed || args.back() != a;
  }
  if (!changed) return t;
  return confcompat::detail::make_term(t->kind, t->name, t->value, t->bop, std::move(args));
}

inline Formula rewrite(const Formula& f, const TermRewrite& leaf) {
  switch (f->kind) {
    case FormulaKind::True:
    case FormulaKind::False: return f;
    case FormulaKind::Pred: {
      Term t = rewrite(f->pred, leaf);
      return t == f->pred ? f : formula::pred(std::move(t));
    }
    case FormulaKind::Target: {
      TargetAtom atom = *f->target;
      atom.attribute = rewrite(atom.attribute, leaf);
      for (auto& e : atom.extras) e = rewrite(e, leaf);
      return formula::target(std::move(atom));
    }
    case FormulaKind::Not: return formula::negate(rewrite(f->children[0], leaf));
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> parts;
      parts.reserve(f->children.size());
      for (const auto& c : f->children) parts.push_back(rewrite(c, leaf));
      return f->kind == FormulaKind::And ? formula::conj(parts) : formula::disj(parts);
    }
  }
  return f;
}

// phi[e/x] for each (x, e) pair, applied simultaneously.
inline Formula substitute(const Formula& f, const std::map<std::string, Term>& repl) {
  if (repl.empty()) return f;
  return rewrite(f, [&](const Term& t) -> std::optional<Term> {
    if (t->kind == TermKind::Var) {
      auto it = repl.find(t->name);
      if (it != repl.end()) return it->second;
    }
    return std::nullopt;
  });
}

inline Formula substitute(const Formula& f, const std::string& var, const Term& value) {
  return substitute(f, std::map<std::string, Term>{{var, value}});
}

// phi[value/array[index]]: every read array[j] becomes
// ite(j == index, value, array[j]). The ite is kept even for identical index
// terms so that a read's term depends only on the store sequence.
inline Formula substitute_element(const Formula& f, const std::string& array, const Term& index,
                                  const Term& value) {
  std::function<std::optional<Term>(const Term&)> leaf;
  leaf = [&](const Term& t) -> std::optional<Term> {
    if (t->kind != TermKind::Elem || t->name != array) return std::nullopt;
    Term j = rewrite(t->args[0], leaf);
    Term cell = j == t->args[0] ? t : term::elem(array, j);
    return term::ite(term::binary(BinOp::Eq, j, index), value, cell);
  };
  return rewrite(f, leaf);
}

template <typename F>
void visit_terms(const Term& t, F&& f) {
  f(t);
  for (const auto& a : t->args) visit_terms(a, f);
}

template <typename F>
void visit_terms(const Formula& phi, F&& f) {
  switch (phi->kind) {
    case FormulaKind::Pred: visit_terms(phi->pred, f); break;
    case FormulaKind::Target:
      visit_terms(phi->target->attribute, f);
      for (const auto& e : phi->target->extras) visit_terms(e, f);
      break;
    default:
      for (const auto& c : phi->children) visit_terms(c, f);
  }
}

template <typename F>
void visit_targets(const Formula& phi, F&& f) {
  if (phi->kind == FormulaKind::Target) f(*phi->target);
  for (const auto& c : phi->children) visit_targets(c, f);
}

inline std::size_t count_targets(const Formula& phi) {
  std::size_t n = 0;
  visit_targets(phi, [&](const TargetAtom&) { ++n; });
  return n;
}

inline const std::string& to_string(const Formula& f) { return f->key; }
inline const std::string& to_string(const Term& t) { return t->key; }

// ---------------------------------------------------------------------------
// Concrete evaluation

// How free symbols resolve under a concrete state.
struct Interpretation {
  std::function<Value(const std::string&)> var;
  std::function<Value(const std::string& api, const std::vector<Value>& args)> api;
  std::function<Value(const std::string& array, const Value& index)> elem;
  std::function<std::int64_t(const std::string&)> attr;
};

inline Value evaluate(const Term& t, const Interpretation& in) {
  switch (t->kind) {
    case TermKind::Var: return in.var(t->name);
    case TermKind::Int: return t->value;
    case TermKind::Str: return t->name;
    case TermKind::Attr: return in.attr(t->name);
    case TermKind::Null: return kNullValue;
    case TermKind::Api: {
      std::vector<Value> args;
      for (const auto& a : t->args) args.push_back(evaluate(a, in));
      return in.api(t->name, args);
    }
    case TermKind::Unary: return eval_op(UnOp::Neg, evaluate(t->args[0], in));
    case TermKind::Binary: return eval_op(t->bop, evaluate(t->args[0], in), evaluate(t->args[1], in));
    case TermKind::StrEq: return str_eq(evaluate(t->args[0], in), t->name);
    case TermKind::Elem: return in.elem(t->name, evaluate(t->args[0], in));
    case TermKind::Ite:
      return truthy(evaluate(t->args[0], in)) ? evaluate(t->args[1], in) : evaluate(t->args[2], in);
  }
  return std::int64_t{0};
}

// Target atoms are markers and hold in every state.
inline bool evaluate(const Formula& f, const Interpretation& in) {
  switch (f->kind) {
    case FormulaKind::True: return true;
    case FormulaKind::False: return false;
    case FormulaKind::Target: return true;
    case FormulaKind::Pred: return truthy(evaluate(f->pred, in));
    case FormulaKind::Not: return !evaluate(f->children[0], in);
    case FormulaKind::And:
      for (const auto& c : f->children)
        if (!evaluate(c, in)) return false;
      return true;
    case FormulaKind::Or:
      for (const auto& c : f->children)
        if (evaluate(c, in)) return true;
      return false;
  }
  return false;
}

namespace detail {
// Attribute ids live in the snapshot, so attribute constants are never ground.
inline Value eval_ground(const Term& t) {
  Interpretation in;
  return evaluate(t, in);
}
}  // namespace detail

}  // namespace confcompat
