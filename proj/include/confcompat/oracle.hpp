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

// Forward enumeration of configuration constraints, used as a test oracle
// for the backward pipeline. It executes every path from every method entry
// concretely, forking on each unknown input (an unset variable or a fresh
// API-call result) over the solver's value domain, and reads A and X off the
// concrete values seen at each target.
//
// Two API calls return the same value exactly when their call expressions,
// written over the method-entry inputs, are identical.

#include <confcompat/refine.hpp>
#include <confcompat/solver.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

namespace confcompat {

struct OracleOptions {
  std::size_t max_states = 200'000;
  int max_occurrences = 2;
};

struct OracleResult {
  std::vector<ConfigConstraint> constraints;  // sorted, deduplicated
  bool refused = false;
  std::string reason;
  std::size_t states = 0;
  std::size_t hits = 0;  // target executions observed
};

namespace detail::oracle {

struct Sym {
  Value v;
  Term t;
};

struct Run {
  std::size_t method = 0;
  std::size_t index = 0;
  std::size_t entry = 0;
  std::map<std::string, Sym> env;
  std::map<std::string, Value> memo;  // call expression -> result
  std::vector<std::uint8_t> occ;
  std::vector<Term> conds;
  // array -> stores in program order
  std::map<std::string, std::vector<std::pair<Sym, Sym>>> stores;
};

struct Hit {
  Value attribute;
  std::map<std::string, Value> tags;  // getName call expression -> result
};

// getName calls that are not themselves arguments of another call.
inline void collect_tags(const Term& t, std::set<std::string>& out) {
  if (t->kind == TermKind::Api) {
    if (is_get_name(t->name)) out.insert(t->key);
    return;
  }
  for (const auto& a : t->args) collect_tags(a, out);
}

struct Refused {
  std::string why;
};

}  // namespace detail::oracle

inline OracleResult forward_oracle(const FrameworkSnapshot& snap, const std::string& class_name,
                                   const ConfigApiSpec& spec, const OracleOptions& opts = {}) {
  using namespace detail::oracle;
  const IrClass* cls = snap.find_class(class_name);
  if (!cls) throw std::invalid_argument("no class named " + class_name);

  OracleResult result;
  const ConstantPool pool = class_constant_pool(*cls, snap.attr_consts);
  const Domain dom = build_domain(pool.ints, pool.strings);

  std::vector<std::size_t> offset;
  std::size_t nodes = 0;
  for (const auto& m : cls->methods) {
    offset.push_back(nodes);
    nodes += m.body.size();
  }
  auto node_of = [&](std::size_t m, std::size_t i) { return offset[m] + i; };

  // Call sites of each method that have a statement to return to.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> return_sites(cls->methods.size());
  std::vector<std::optional<std::size_t>> callee_of(nodes);
  for (std::size_t m = 0; m < cls->methods.size(); ++m)
    for (std::size_t i = 0; i < cls->methods[m].body.size(); ++i) {
      const auto* inv = std::get_if<InvokeStmt>(&cls->methods[m].body[i].stmt);
      if (!inv || inv->method.find('.') != std::string::npos) continue;
      auto c = cls->method_index(inv->method);
      if (!c || cls->methods[*c].body.empty()) continue;
      callee_of[node_of(m, i)] = c;
      if (i + 1 < cls->methods[m].body.size()) return_sites[*c].push_back({m, i + 1});
    }

  std::map<std::pair<std::size_t, std::size_t>, std::vector<Hit>> hits;  // (target, entry)
  std::map<std::size_t, std::string> target_api;
  std::map<std::size_t, std::string> target_site;

  std::vector<Run> stack;
  auto enter = [&](Run r, std::size_t m, std::size_t i) {
    std::size_t n = node_of(m, i);
    if (r.occ[n] >= opts.max_occurrences) return;
    ++r.occ[n];
    r.method = m;
    r.index = i;
    stack.push_back(std::move(r));
  };
  for (std::size_t m = cls->methods.size(); m-- > 0;) {
    if (cls->methods[m].body.empty()) continue;
    Run r;
    r.entry = node_of(m, 0);
    r.occ.assign(nodes, 0);
    enter(std::move(r), m, 0);
  }

  try {
    while (!stack.empty()) {
      Run run = std::move(stack.back());
      stack.pop_back();
      if (++result.states > opts.max_states)
        throw Refused{"state budget of " + std::to_string(opts.max_states) + " exhausted"};

      const IrMethod& method = cls->methods[run.method];
      const IrStmt& stmt = method.body[run.index].stmt;
      const std::size_t here = node_of(run.method, run.index);

      // Fork on the first unset variable this statement reads.
      std::optional<std::string> unset;
      auto need = [&](const std::string& v) {
        if (!unset && !run.env.count(v)) unset = v;
      };
      confcompat::detail::for_each_operand(stmt, [&](const Operand& o) {
        if (o.kind == Operand::Kind::Var) need(o.name);
      });
      if (const auto* br = std::get_if<BranchStmt>(&stmt)) need(br->cond);
      if (unset) {
        for (auto it = dom.values.rbegin(); it != dom.values.rend(); ++it) {
          Run child = run;
          child.env[*unset] = {*it, term::var(*unset)};
          stack.push_back(std::move(child));
        }
        continue;
      }

      auto scalar = [&](const Operand& o) -> Sym {
        switch (o.kind) {
          case Operand::Kind::Var: return run.env.at(o.name);
          case Operand::Kind::Int: return {o.value, term::integer(o.value)};
          case Operand::Kind::Str: return {o.name, term::str(o.name)};
          case Operand::Kind::Attr: return {snap.attr_consts.at(o.name), term::attr(o.name)};
          case Operand::Kind::Null: return {kNullValue, term::null()};
          case Operand::Kind::Elem: break;
        }
        throw std::logic_error("array read in scalar position");
      };

      // Array reads: the term wraps the initial cell in one ite per earlier
      // store; the value comes from the newest store with an equal index, or
      // else from the (forked) initial cell.
      std::optional<std::string> fresh_cell;
      auto read = [&](const Operand& o) -> std::optional<Sym> {
        const Sym j = scalar(*o.index);
        Term cell = term::elem(o.name, j.t);
        Term t = cell;
        std::optional<Value> v;
        auto it = run.stores.find(o.name);
        if (it != run.stores.end()) {
          for (const auto& [idx, val] : it->second)
            t = term::ite(term::binary(BinOp::Eq, j.t, idx.t), val.t, t);
          for (auto s = it->second.rbegin(); s != it->second.rend() && !v; ++s)
            if (truthy(eval_op(BinOp::Eq, j.v, s->first.v))) v = s->second.v;
        }
        if (!v) {
          auto m = run.memo.find(cell->key);
          if (m == run.memo.end()) {
            if (!fresh_cell) fresh_cell = cell->key;
            return std::nullopt;
          }
          v = m->second;
        }
        return Sym{*v, t};
      };
      std::map<const Operand*, Sym> reads;
      confcompat::detail::for_each_operand(stmt, [&](const Operand& o) {
        if (o.kind != Operand::Kind::Elem) return;
        if (auto r = read(o)) reads.emplace(&o, *r);
      });
      if (fresh_cell) {
        for (auto it = dom.values.rbegin(); it != dom.values.rend(); ++it) {
          Run child = run;
          child.memo[*fresh_cell] = *it;
          stack.push_back(std::move(child));
        }
        continue;
      }
      auto sym = [&](const Operand& o) -> Sym {
        if (o.kind == Operand::Kind::Elem) return reads.at(&o);
        return scalar(o);
      };

      // Calls: fork on a result not seen before.
      const std::string* api = nullptr;
      const std::vector<Operand>* api_args = nullptr;
      if (const auto* a = std::get_if<ApiAssignStmt>(&stmt)) api = &a->api, api_args = &a->args;
      if (const auto* t = std::get_if<TargetStmt>(&stmt)) api = &t->api, api_args = &t->args;
      Sym call_result;
      std::vector<Sym> arg_syms;
      if (api) {
        std::vector<Term> terms;
        for (const auto& a : *api_args) {
          arg_syms.push_back(sym(a));
          terms.push_back(arg_syms.back().t);
        }
        Term call = term::api(*api, terms);
        auto m = run.memo.find(call->key);
        if (m == run.memo.end()) {
          for (auto it = dom.values.rbegin(); it != dom.values.rend(); ++it) {
            Run child = run;
            child.memo[call->key] = *it;
            stack.push_back(std::move(child));
          }
          continue;
        }
        call_result = {m->second, call};
      }

      const std::size_t m_here = run.method, i_here = run.index;
      auto fallthrough = [&](Run r) {
        if (i_here + 1 < method.body.size()) enter(std::move(r), m_here, i_here + 1);
      };
      auto jump = [&](Run r, const std::string& label) {
        enter(std::move(r), m_here, *method.label_index(label));
      };

      std::visit(
          [&](const auto& st) {
            using T = std::decay_t<decltype(st)>;
            if constexpr (std::is_same_v<T, CopyStmt>) {
              Sym s = sym(st.src);
              if (st.op) s = {eval_op(*st.op, s.v), term::neg(s.t)};
              run.env[st.dst] = s;
              fallthrough(std::move(run));
            } else if constexpr (std::is_same_v<T, BinaryStmt>) {
              Sym a = sym(st.lhs), b = sym(st.rhs);
              run.env[st.dst] = {eval_op(st.op, a.v, b.v), term::binary(st.op, a.t, b.t)};
              fallthrough(std::move(run));
            } else if constexpr (std::is_same_v<T, ApiAssignStmt>) {
              run.env[st.dst] = call_result;
              fallthrough(std::move(run));
            } else if constexpr (std::is_same_v<T, FieldStoreStmt>) {
              run.env[st.object + "." + st.field] = sym(st.value);
              fallthrough(std::move(run));
            } else if constexpr (std::is_same_v<T, ArrayStoreStmt>) {
              run.stores[st.array].push_back({sym(st.index), sym(st.value)});
              fallthrough(std::move(run));
            } else if constexpr (std::is_same_v<T, StrEqAssignStmt>) {
              Sym s = sym(st.src);
              run.env[st.dst] = {str_eq(s.v, st.literal), term::str_eq(s.t, st.literal)};
              fallthrough(std::move(run));
            } else if constexpr (std::is_same_v<T, BranchStmt>) {
              const Sym& c = run.env.at(st.cond);
              const bool taken = truthy(c.v);
              run.conds.push_back(c.t);
              jump(std::move(run), taken ? st.on_true : st.on_false);
            } else if constexpr (std::is_same_v<T, GotoStmt>) {
              jump(std::move(run), st.label);
            } else if constexpr (std::is_same_v<T, InvokeStmt>) {
              if (auto c = callee_of[here]) {
                std::vector<Sym> vals;
                for (const auto& a : st.args) vals.push_back(sym(a));
                const auto& params = cls->methods[*c].params;
                for (std::size_t k = 0; k < params.size() && k < vals.size(); ++k)
                  run.env[params[k]] = vals[k];
                enter(std::move(run), *c, 0);
              } else {
                fallthrough(std::move(run));
              }
            } else if constexpr (std::is_same_v<T, TargetStmt>) {
              std::set<std::string> tag_keys;
              for (const auto& t : run.conds) collect_tags(t, tag_keys);
              for (const auto& a : arg_syms) collect_tags(a.t, tag_keys);
              Hit h;
              h.attribute = arg_syms.front().v;
              for (const auto& k : tag_keys) h.tags[k] = run.memo.at(k);
              hits[{here, run.entry}].push_back(std::move(h));
              target_api[here] = st.api;
              target_site[here] = cls->name + "." + method.name + "#" + std::to_string(i_here);
              ++result.hits;
              run.env[st.dst] = call_result;
              fallthrough(std::move(run));
            } else if constexpr (std::is_same_v<T, ReturnStmt>) {
              for (const auto& [m, i] : return_sites[run.method]) enter(run, m, i);
            }
          },
          stmt);
    }
  } catch (const Refused& r) {
    result.refused = true;
    result.reason = r.why;
    result.constraints.clear();
    return result;
  }

  for (const auto& [key, group] : hits) {
    const auto* formats = spec.find(target_api.at(key.first));
    if (!formats)
      throw ConfigError(target_site.at(key.first) + ": configuration API '" +
                        target_api.at(key.first) + "' is not in the spec");
    bool keep = true;
    std::vector<std::string> attributes;
    std::set<Value> avals;
    for (const auto& h : group) avals.insert(h.attribute);
    for (const auto& v : avals) {
      auto name = is_int(v) && !dom.is_witness(v) ? snap.attr_name_for(std::get<std::int64_t>(v))
                                                  : std::nullopt;
      if (!name) keep = false;
      else attributes.push_back(render_attribute(*name));
    }
    std::set<std::string> all_tags;
    for (const auto& h : group)
      for (const auto& [k, _] : h.tags) all_tags.insert(k);
    std::set<std::string> xs;
    if (all_tags.empty()) xs.insert(cls->name);
    for (const auto& k : all_tags)
      for (const auto& h : group) {
        auto it = h.tags.find(k);
        // absent on this path: the tag is unconstrained there
        if (it == h.tags.end() || dom.is_witness(it->second) || !is_str(it->second)) keep = false;
        else xs.insert(std::get<std::string>(it->second));
      }
    if (!keep) continue;
    for (const auto& a : attributes)
      for (const auto& x : xs)
        for (auto f : *formats)
          result.constraints.push_back({a, x, f, snap.api_level, target_site.at(key.first)});
  }
  finalize_constraints(result.constraints);
  return result;
}

}  // namespace confcompat
