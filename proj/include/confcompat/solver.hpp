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

// Finite-domain satisfiability for path constraints.
//
// Every free variable ranges over the same domain: the integer and string
// constants of the query (plus 0), one integer witness strictly above every
// integer constant and one string witness distinct from every string
// constant. Search is chronological backtracking with three-valued partial
// evaluation; a top-level disjunction is split into independent queries.

#include <confcompat/formula.hpp>
#include <confcompat/ir.hpp>
#include <confcompat/parser.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace confcompat {

// ---------------------------------------------------------------------------
// Symbolization

struct Symbolized {
  Formula formula;
  // fresh variable -> the API call / array read it stands for
  std::vector<std::pair<std::string, Term>> symbols;
  std::map<std::string, std::int64_t> attr_ids;

  // Rewrites a term of the original formula into the symbolized vocabulary.
  Term map_term(const Term& t) const;
  std::optional<std::string> var_for(const Term& original) const {
    for (const auto& [name, orig] : symbols)
      if (orig->key == original->key) return name;
    return std::nullopt;
  }
};

namespace detail {
inline Term symbolize_term(const Term& t, std::vector<std::pair<std::string, Term>>& symbols,
                           std::unordered_map<std::string, std::string>& by_key,
                           const std::map<std::string, std::int64_t>& attr_ids, bool extend) {
  return rewrite(t, [&](const Term& n) -> std::optional<Term> {
    switch (n->kind) {
      case TermKind::Api:
      case TermKind::Elem: {
        auto it = by_key.find(n->key);
        if (it != by_key.end()) return term::var(it->second);
        if (!extend) throw std::invalid_argument("term " + n->key + " does not occur in the query");
        std::string name = "$" + std::to_string(symbols.size());
        by_key.emplace(n->key, name);
        symbols.emplace_back(name, n);
        return term::var(name);
      }
      case TermKind::Attr: {
        auto it = attr_ids.find(n->name);
        if (it == attr_ids.end()) throw std::invalid_argument("undeclared attribute " + n->name);
        return term::integer(it->second);
      }
      case TermKind::Null: return term::integer(kNullValue);
      default: return std::nullopt;
    }
  });
}
}  // namespace detail

// Each structurally distinct API call (or array read) becomes one fresh
// variable; attribute constants become their declared ids; null becomes the
// reserved integer. Target atoms are kept as markers with rewritten args.
inline Symbolized symbolize(const Formula& f, const std::map<std::string, std::int64_t>& attr_ids) {
  Symbolized out;
  out.attr_ids = attr_ids;
  std::unordered_map<std::string, std::string> by_key;
  out.formula = rewrite(f, [&](const Term& t) -> std::optional<Term> {
    return detail::symbolize_term(t, out.symbols, by_key, attr_ids, true);
  });
  return out;
}

inline Term Symbolized::map_term(const Term& t) const {
  std::vector<std::pair<std::string, Term>> syms = symbols;
  std::unordered_map<std::string, std::string> by_key;
  for (const auto& [name, orig] : symbols) by_key.emplace(orig->key, name);
  return detail::symbolize_term(t, syms, by_key, attr_ids, false);
}

// ---------------------------------------------------------------------------
// Domains

struct ConstantPool {
  std::set<std::int64_t> ints;
  std::set<std::string> strings;
};

struct Domain {
  std::vector<Value> values;  // constants in order, then the two witnesses
  Value int_witness;
  Value str_witness;

  bool is_witness(const Value& v) const { return v == int_witness || v == str_witness; }
};

inline Domain build_domain(std::set<std::int64_t> ints, const std::set<std::string>& strings) {
  ints.insert(0);
  Domain d;
  for (auto i : ints) d.values.push_back(i);
  for (const auto& s : strings) d.values.push_back(s);
  std::int64_t w = *ints.rbegin();
  if (w < std::numeric_limits<std::int64_t>::max()) {
    w += 1;
  } else {
    w = 1;
    while (ints.count(w)) ++w;
  }
  std::string sw = "<fresh>";
  while (strings.count(sw)) sw += "'";
  d.int_witness = w;
  d.str_witness = sw;
  d.values.push_back(d.int_witness);
  d.values.push_back(d.str_witness);
  return d;
}

inline void collect_constants(const Formula& f, ConstantPool& pool) {
  visit_terms(f, [&](const Term& t) {
    if (t->kind == TermKind::Int) pool.ints.insert(t->value);
    if (t->kind == TermKind::Null) pool.ints.insert(kNullValue);
    if (t->kind == TermKind::Str || t->kind == TermKind::StrEq) pool.strings.insert(t->name);
  });
}

// Every constant a class can produce: literals, referenced attribute ids and
// null. Supplying this as the query pool makes the solver's domain a function
// of the class alone, which the forward oracle reproduces.
inline ConstantPool class_constant_pool(const IrClass& cls,
                                        const std::map<std::string, std::int64_t>& attr_ids) {
  ConstantPool pool;
  auto add = [&](const Operand& o) {
    switch (o.kind) {
      case Operand::Kind::Int: pool.ints.insert(o.value); break;
      case Operand::Kind::Str: pool.strings.insert(o.name); break;
      case Operand::Kind::Null: pool.ints.insert(kNullValue); break;
      case Operand::Kind::Attr: {
        auto it = attr_ids.find(o.name);
        if (it != attr_ids.end()) pool.ints.insert(it->second);
        break;
      }
      default: break;
    }
  };
  for (const auto& m : cls.methods)
    for (const auto& line : m.body) {
      detail::for_each_operand(line.stmt, add);
      if (const auto* s = std::get_if<StrEqAssignStmt>(&line.stmt)) pool.strings.insert(s->literal);
    }
  return pool;
}

// ---------------------------------------------------------------------------
// Queries

struct Focus {
  enum class Kind { Term, TargetAttribute };
  Kind kind = Kind::Term;
  Term term;  // symbolized vocabulary

  static Focus of(Term t) { return {Kind::Term, std::move(t)}; }
  static Focus target_attribute() { return {Kind::TargetAttribute, nullptr}; }
};

struct SolverQuery {
  Formula formula;  // symbolized
  std::optional<Focus> focus;
  std::size_t budget = 1'000'000;
  ConstantPool pool;  // extra domain constants
};

struct SolverOutcome {
  enum class Status { Sat, Unsat, BudgetExceeded };
  Status status = Status::Unsat;
  std::map<std::string, Value> model;
  std::size_t steps = 0;
};

struct ValueSet {
  enum class Status { Complete, Undecidable };
  Status status = Status::Complete;
  std::set<Value> values;
  bool closed = true;
  std::size_t steps = 0;
};

inline Domain domain_for(const SolverQuery& q) {
  ConstantPool pool = q.pool;
  collect_constants(q.formula, pool);
  if (q.focus && q.focus->term) {
    visit_terms(q.focus->term, [&](const Term& t) {
      if (t->kind == TermKind::Int) pool.ints.insert(t->value);
      if (t->kind == TermKind::Str || t->kind == TermKind::StrEq) pool.strings.insert(t->name);
    });
  }
  return build_domain(std::move(pool.ints), pool.strings);
}

namespace detail {

struct BudgetExhausted {};

enum class Tri { False, True, Unknown };

class PartialEvaluator {
 public:
  explicit PartialEvaluator(const std::unordered_map<std::string, Value>& env) : env_(env) {}

  std::optional<Value> eval(const Term& t) const {
    switch (t->kind) {
      case TermKind::Var: {
        auto it = env_.find(t->name);
        if (it == env_.end()) return std::nullopt;
        return it->second;
      }
      case TermKind::Int: return t->value;
      case TermKind::Str: return t->name;
      case TermKind::Null: return kNullValue;
      case TermKind::Unary: {
        auto v = eval(t->args[0]);
        if (!v) return std::nullopt;
        return eval_op(UnOp::Neg, *v);
      }
      case TermKind::Binary: {
        auto a = eval(t->args[0]);
        auto b = eval(t->args[1]);
        if (t->bop == BinOp::And) {
          if ((a && !truthy(*a)) || (b && !truthy(*b))) return from_bool(false);
        } else if (t->bop == BinOp::Or) {
          if ((a && truthy(*a)) || (b && truthy(*b))) return from_bool(true);
        }
        if (!a || !b) return std::nullopt;
        return eval_op(t->bop, *a, *b);
      }
      case TermKind::StrEq: {
        auto v = eval(t->args[0]);
        if (!v) return std::nullopt;
        return str_eq(*v, t->name);
      }
      case TermKind::Ite: {
        auto c = eval(t->args[0]);
        if (c) return truthy(*c) ? eval(t->args[1]) : eval(t->args[2]);
        auto x = eval(t->args[1]);
        auto y = eval(t->args[2]);
        if (x && y && *x == *y) return x;
        return std::nullopt;
      }
      case TermKind::Attr:
      case TermKind::Api:
      case TermKind::Elem: break;
    }
    throw std::logic_error("solver query is not symbolized: " + t->key);
  }

  Tri eval(const Formula& f) const {
    switch (f->kind) {
      case FormulaKind::True:
      case FormulaKind::Target: return Tri::True;
      case FormulaKind::False: return Tri::False;
      case FormulaKind::Pred: {
        auto v = eval(f->pred);
        if (!v) return Tri::Unknown;
        return truthy(*v) ? Tri::True : Tri::False;
      }
      case FormulaKind::Not: {
        Tri t = eval(f->children[0]);
        return t == Tri::Unknown ? t : (t == Tri::True ? Tri::False : Tri::True);
      }
      case FormulaKind::And: {
        Tri acc = Tri::True;
        for (const auto& c : f->children) {
          Tri t = eval(c);
          if (t == Tri::False) return t;
          if (t == Tri::Unknown) acc = t;
        }
        return acc;
      }
      case FormulaKind::Or: {
        Tri acc = Tri::False;
        for (const auto& c : f->children) {
          Tri t = eval(c);
          if (t == Tri::True) return t;
          if (t == Tri::Unknown) acc = t;
        }
        return acc;
      }
    }
    return Tri::Unknown;
  }

 private:
  const std::unordered_map<std::string, Value>& env_;
};

inline std::vector<std::string> free_vars(const Formula& f) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  visit_terms(f, [&](const Term& t) {
    if (t->kind == TermKind::Var && seen.insert(t->name).second) out.push_back(t->name);
  });
  return out;
}

inline std::vector<std::string> free_vars(const Term& term) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  visit_terms(term, [&](const Term& t) {
    if (t->kind == TermKind::Var && seen.insert(t->name).second) out.push_back(t->name);
  });
  return out;
}

class Search {
 public:
  Search(const Domain& dom, std::size_t budget) : dom_(dom), budget_(budget) {}

  std::size_t steps() const { return steps_; }
  std::unordered_map<std::string, Value>& env() { return env_; }

  void tick() {
    if (++steps_ > budget_) throw BudgetExhausted{};
  }

  // Extends the current assignment over `vars[i..]` until `f` holds.
  bool solve(const Formula& f, const std::vector<std::string>& vars, std::size_t i = 0) {
    tick();
    Tri t = PartialEvaluator(env_).eval(f);
    if (t == Tri::False) return false;
    if (t == Tri::True) return true;
    while (i < vars.size() && env_.count(vars[i])) ++i;
    if (i == vars.size()) return false;
    for (const auto& v : dom_.values) {
      env_[vars[i]] = v;
      if (solve(f, vars, i + 1)) return true;
    }
    env_.erase(vars[i]);
    return false;
  }

 private:
  const Domain& dom_;
  std::size_t budget_;
  std::size_t steps_ = 0;
  std::unordered_map<std::string, Value> env_;
};

inline std::vector<Formula> disjuncts(const Formula& f) {
  if (f->kind == FormulaKind::Or) return f->children;
  return {f};
}

}  // namespace detail

inline SolverOutcome check_sat(const SolverQuery& q) {
  if (q.budget < 1) throw std::invalid_argument("solver budget must be at least 1");
  const Domain dom = domain_for(q);
  detail::Search search(dom, q.budget);
  SolverOutcome out;
  try {
    for (const auto& d : detail::disjuncts(q.formula)) {
      search.env().clear();
      if (search.solve(d, detail::free_vars(d))) {
        out.status = SolverOutcome::Status::Sat;
        for (const auto& v : detail::free_vars(q.formula)) {
          auto it = search.env().find(v);
          out.model[v] = it != search.env().end() ? it->second : dom.values.front();
        }
        out.steps = search.steps();
        return out;
      }
    }
    out.status = SolverOutcome::Status::Unsat;
  } catch (const detail::BudgetExhausted&) {
    out.status = SolverOutcome::Status::BudgetExceeded;
  }
  out.steps = search.steps();
  return out;
}

// Every value the focus takes over satisfying assignments. `closed` is false
// when a witness value is among them.
inline ValueSet enumerate_values(const SolverQuery& q) {
  if (!q.focus) throw std::invalid_argument("enumerate_values needs a focus");
  if (q.budget < 1) throw std::invalid_argument("solver budget must be at least 1");
  const Domain dom = domain_for(q);
  detail::Search search(dom, q.budget);
  ValueSet out;
  try {
    for (const auto& d : detail::disjuncts(q.formula)) {
      Term focus = q.focus->term;
      if (q.focus->kind == Focus::Kind::TargetAttribute) {
        visit_targets(d, [&](const TargetAtom& a) {
          if (!focus) focus = a.attribute;
        });
        if (!focus) throw std::invalid_argument("disjunct without a target atom: " + d->key);
      }
      const auto fvars = detail::free_vars(focus);
      const auto rest = detail::free_vars(d);
      // Odometer over the focus variables; the rest is existential.
      std::vector<std::size_t> digit(fvars.size(), 0);
      for (;;) {
        search.env().clear();
        for (std::size_t k = 0; k < fvars.size(); ++k) search.env()[fvars[k]] = dom.values[digit[k]];
        if (search.solve(d, rest)) {
          auto v = detail::PartialEvaluator(search.env()).eval(focus);
          if (!v) throw std::logic_error("focus not determined by its variables");
          out.values.insert(*v);
        }
        std::size_t k = 0;
        while (k < digit.size() && ++digit[k] == dom.values.size()) digit[k++] = 0;
        if (k == digit.size()) break;
      }
    }
  } catch (const detail::BudgetExhausted&) {
    out.status = ValueSet::Status::Undecidable;
    out.values.clear();
    out.closed = false;
    out.steps = search.steps();
    return out;
  }
  out.closed = std::none_of(out.values.begin(), out.values.end(),
                            [&](const Value& v) { return dom.is_witness(v); });
  out.steps = search.steps();
  return out;
}

}  // namespace confcompat
