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

// Concrete execution of single IR statements. Used to check the symbolic
// transformers against real state changes.

#include <confcompat/formula.hpp>
#include <confcompat/icfg.hpp>
#include <confcompat/ir.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace confcompat {

// Unset variables and array cells read as 0.
struct ConcreteState {
  std::map<std::string, Value> vars;
  std::map<std::string, std::map<Value, Value>> arrays;

  Value var(const std::string& n) const {
    auto it = vars.find(n);
    return it == vars.end() ? Value{std::int64_t{0}} : it->second;
  }
  Value cell(const std::string& a, const Value& i) const {
    auto it = arrays.find(a);
    if (it == arrays.end()) return std::int64_t{0};
    auto c = it->second.find(i);
    return c == it->second.end() ? Value{std::int64_t{0}} : c->second;
  }
};

// API calls are deterministic functions of their name and arguments.
using ApiModel = std::function<Value(const std::string&, const std::vector<Value>&)>;

struct ConcreteContext {
  ApiModel api;
  std::map<std::string, std::int64_t> attr_ids;
};

inline Value eval_operand(const Operand& o, const ConcreteState& s, const ConcreteContext& ctx) {
  switch (o.kind) {
    case Operand::Kind::Var: return s.var(o.name);
    case Operand::Kind::Int: return o.value;
    case Operand::Kind::Str: return o.name;
    case Operand::Kind::Attr: return ctx.attr_ids.at(o.name);
    case Operand::Kind::Null: return kNullValue;
    case Operand::Kind::Elem: return s.cell(o.name, eval_operand(*o.index, s, ctx));
  }
  return std::int64_t{0};
}

inline Interpretation interpretation(const ConcreteState& s, const ConcreteContext& ctx) {
  Interpretation in;
  in.var = [&s](const std::string& n) { return s.var(n); };
  in.api = [&ctx](const std::string& a, const std::vector<Value>& args) { return ctx.api(a, args); };
  in.elem = [&s](const std::string& a, const Value& i) { return s.cell(a, i); };
  in.attr = [&ctx](const std::string& n) { return ctx.attr_ids.at(n); };
  return in;
}

inline bool holds(const Formula& f, const ConcreteState& s, const ConcreteContext& ctx) {
  return evaluate(f, interpretation(s, ctx));
}

struct StepResult {
  ConcreteState state;
  // Branches: the edge taken. Everything else leaves it empty.
  std::optional<EdgeKind> branch;
};

// `callee_params` binds parameters for an invoke that enters its callee.
inline StepResult execute(const IrStmt& stmt, const ConcreteState& in, const ConcreteContext& ctx,
                          const std::vector<std::string>* callee_params = nullptr) {
  StepResult r{in, std::nullopt};
  auto& s = r.state;
  auto ev = [&](const Operand& o) { return eval_operand(o, in, ctx); };
  auto call = [&](const std::string& api, const std::vector<Operand>& args) {
    std::vector<Value> vs;
    for (const auto& a : args) vs.push_back(ev(a));
    return ctx.api(api, vs);
  };
  std::visit(
      [&](const auto& st) {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, CopyStmt>) {
          Value v = ev(st.src);
          s.vars[st.dst] = st.op ? eval_op(*st.op, v) : v;
        } else if constexpr (std::is_same_v<T, BinaryStmt>) {
          s.vars[st.dst] = eval_op(st.op, ev(st.lhs), ev(st.rhs));
        } else if constexpr (std::is_same_v<T, ApiAssignStmt> || std::is_same_v<T, TargetStmt>) {
          s.vars[st.dst] = call(st.api, st.args);
        } else if constexpr (std::is_same_v<T, FieldStoreStmt>) {
          s.vars[st.object + "." + st.field] = ev(st.value);
        } else if constexpr (std::is_same_v<T, ArrayStoreStmt>) {
          s.arrays[st.array][ev(st.index)] = ev(st.value);
        } else if constexpr (std::is_same_v<T, StrEqAssignStmt>) {
          s.vars[st.dst] = str_eq(ev(st.src), st.literal);
        } else if constexpr (std::is_same_v<T, BranchStmt>) {
          r.branch = truthy(in.var(st.cond)) ? EdgeKind::BranchTrue : EdgeKind::BranchFalse;
        } else if constexpr (std::is_same_v<T, InvokeStmt>) {
          if (!callee_params) return;
          // Arguments are read before any parameter is written.
          std::vector<Value> vs;
          for (const auto& a : st.args) vs.push_back(ev(a));
          for (std::size_t k = 0; k < callee_params->size() && k < vs.size(); ++k)
            s.vars[(*callee_params)[k]] = vs[k];
        }
      },
      stmt);
  return r;
}

}  // namespace confcompat
