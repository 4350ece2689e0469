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

// Backward symbolic execution over a trimmed ICFG.
//
// Starting from a target statement the engine walks ICFG edges backwards,
// computing the precondition of each predecessor with `trans`. Every work
// item carries its own chain formula and per-node occurrence counts; a node
// may occur at most twice on one chain, which walks every loop back edge at
// least once and bounds the search. Preconditions reaching a method entry are
// disjoined there and become that entry's path constraint.

#include <confcompat/formula.hpp>
#include <confcompat/icfg.hpp>

#include <cstdint>
#include <deque>
#include <string>
#include <unordered_set>
#include <vector>

namespace confcompat {

// Describes the edge a statement is left through during backward execution.
struct TransEdge {
  EdgeKind kind = EdgeKind::Fallthrough;
  // A target statement contributes its TargetAtom only where the analysis
  // starts; elsewhere it is an ordinary API-call assignment.
  bool target_origin = true;
  // For call-entry edges: the callee's parameters, bound to the call's args.
  const std::vector<std::string>* callee_params = nullptr;
  std::string site;
};

// Symbolic state transformer: precondition of `s` for postcondition `post`.
inline Formula trans(const IrStmt& s, const Formula& post, const TransEdge& edge = {}) {
  using term::from_operand;
  return std::visit(
      [&](const auto& st) -> Formula {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, TargetStmt>) {
          std::vector<Term> args;
          for (const auto& a : st.args) args.push_back(from_operand(a));
          Formula pre = substitute(post, st.dst, term::api(st.api, args));
          if (!edge.target_origin) return pre;
          TargetAtom atom{st.api, args.front(), {args.begin() + 1, args.end()}, edge.site};
          return formula::conj(pre, formula::target(std::move(atom)));
        } else if constexpr (std::is_same_v<T, CopyStmt>) {
          Term v = from_operand(st.src);
          if (st.op) v = term::neg(v);
          return substitute(post, st.dst, v);
        } else if constexpr (std::is_same_v<T, BinaryStmt>) {
          return substitute(post, st.dst,
                            term::binary(st.op, from_operand(st.lhs), from_operand(st.rhs)));
        } else if constexpr (std::is_same_v<T, ApiAssignStmt>) {
          std::vector<Term> args;
          for (const auto& a : st.args) args.push_back(from_operand(a));
          return substitute(post, st.dst, term::api(st.api, std::move(args)));
        } else if constexpr (std::is_same_v<T, FieldStoreStmt>) {
          return substitute(post, st.object + "." + st.field, from_operand(st.value));
        } else if constexpr (std::is_same_v<T, ArrayStoreStmt>) {
          return substitute_element(post, st.array, from_operand(st.index),
                                    from_operand(st.value));
        } else if constexpr (std::is_same_v<T, StrEqAssignStmt>) {
          return substitute(post, st.dst, term::str_eq(from_operand(st.src), st.literal));
        } else if constexpr (std::is_same_v<T, BranchStmt>) {
          Formula c = formula::pred(term::var(st.cond));
          if (edge.kind == EdgeKind::BranchFalse) c = formula::negate(c);
          return formula::conj(post, c);
        } else if constexpr (std::is_same_v<T, InvokeStmt>) {
          if (edge.kind != EdgeKind::CallEntry || edge.callee_params == nullptr) return post;
          std::map<std::string, Term> bind;
          const auto& params = *edge.callee_params;
          for (std::size_t k = 0; k < params.size() && k < st.args.size(); ++k)
            bind.emplace(params[k], from_operand(st.args[k]));
          return substitute(post, bind);
        } else {
          return post;  // goto, return
        }
      },
      s);
}

struct PathConstraint {
  Formula formula;
  NodeId target = 0;
  NodeId entry = 0;
  std::string class_name;
  std::string target_site;
  std::string entry_site;
};

struct EngineOptions {
  std::size_t max_expansions = 50'000;
  int max_occurrences = 2;
};

struct PathExtraction {
  std::vector<PathConstraint> paths;
  std::size_t expansions = 0;
  bool budget_exceeded = false;
  std::vector<std::string> diagnostics;
};

inline PathExtraction extract_path_constraints(const TrimmedIcfg& g, NodeId target,
                                               const EngineOptions& opts = {}) {
  if (!g.contains(target) || !std::holds_alternative<TargetStmt>(g.stmt(target)))
    throw std::invalid_argument("node " + std::to_string(target) + " of " + g.class_name() +
                                " is not a target statement");

  struct Item {
    NodeId node;
    Formula phi;
    std::vector<std::uint8_t> occurrences;
  };

  PathExtraction result;
  const std::string site = g.node_name(target);

  // Only entry nodes keep their accumulated precondition.
  std::vector<std::vector<Formula>> at_entry(g.size());
  std::vector<std::unordered_set<std::string>> seen(g.size());
  auto accumulate = [&](NodeId n, const Formula& f) {
    if (g.is_entry(n) && seen[n].insert(f->key).second) at_entry[n].push_back(f);
  };

  std::deque<Item> worklist;
  {
    TransEdge origin;
    origin.site = site;
    Formula init = trans(g.stmt(target), formula::truth(), origin);
    std::vector<std::uint8_t> occ(g.size(), 0);
    occ[target] = 1;
    accumulate(target, init);
    worklist.push_back({target, std::move(init), std::move(occ)});
  }

  while (!worklist.empty()) {
    if (++result.expansions > opts.max_expansions) {
      result.budget_exceeded = true;
      result.diagnostics.push_back(site + ": expansion budget of " +
                                   std::to_string(opts.max_expansions) +
                                   " exceeded, target skipped");
      result.paths.clear();
      return result;
    }
    Item item = std::move(worklist.front());
    worklist.pop_front();
    for (std::size_t ei : g.incoming(item.node)) {
      const IcfgEdge& e = g.edges()[ei];
      if (item.occurrences[e.src] >= opts.max_occurrences) continue;
      TransEdge how;
      how.kind = e.kind;
      how.target_origin = false;
      how.site = site;
      if (e.kind == EdgeKind::CallEntry) how.callee_params = &g.method_of(item.node).params;
      Formula pre = trans(g.stmt(e.src), item.phi, how);
      if (pre->kind == FormulaKind::False) continue;
      accumulate(e.src, pre);
      auto occ = item.occurrences;
      ++occ[e.src];
      worklist.push_back({e.src, std::move(pre), std::move(occ)});
    }
  }

  for (NodeId entry : g.entry_points()) {
    if (at_entry[entry].empty()) continue;
    result.paths.push_back({formula::disj(at_entry[entry]), target, entry, g.class_name(), site,
                            g.node_name(entry)});
  }
  return result;
}

}  // namespace confcompat
