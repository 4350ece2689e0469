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

// Trimmed inter-procedural CFG of one class: per-method CFGs glued together
// by the intra-class call graph. Calls that leave the class are opaque
// pass-through nodes. Call and return edges are not context matched.

#include <confcompat/ir.hpp>
#include <confcompat/parser.hpp>

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace confcompat {

enum class EdgeKind { Fallthrough, BranchTrue, BranchFalse, CallEntry, CallReturn };

inline const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::Fallthrough: return "fallthrough";
    case EdgeKind::BranchTrue: return "branch-true";
    case EdgeKind::BranchFalse: return "branch-false";
    case EdgeKind::CallEntry: return "call-entry";
    case EdgeKind::CallReturn: return "call-return";
  }
  return "?";
}

using NodeId = std::size_t;

struct IcfgNode {
  std::size_t method = 0;
  std::size_t index = 0;
  friend auto operator<=>(const IcfgNode&, const IcfgNode&) = default;
};

struct IcfgEdge {
  NodeId src = 0;
  NodeId dst = 0;
  EdgeKind kind = EdgeKind::Fallthrough;
  friend auto operator<=>(const IcfgEdge&, const IcfgEdge&) = default;
};

class TrimmedIcfg {
 public:
  explicit TrimmedIcfg(IrClass cls) : cls_(std::move(cls)) {}

  const std::string& class_name() const { return cls_.name; }
  const IrClass& ir_class() const { return cls_; }

  const std::vector<IcfgNode>& nodes() const { return nodes_; }
  const std::vector<IcfgEdge>& edges() const { return edges_; }
  const std::vector<NodeId>& entry_points() const { return entries_; }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

  std::size_t size() const { return nodes_.size(); }

  bool contains(NodeId n) const { return n < nodes_.size(); }

  NodeId node_id(std::size_t method, std::size_t index) const {
    if (method >= offsets_.size() || index >= cls_.methods[method].body.size())
      throw std::out_of_range("no such statement in class " + cls_.name);
    return offsets_[method] + index;
  }

  const IrStmt& stmt(NodeId n) const {
    const auto& loc = nodes_.at(n);
    return cls_.methods[loc.method].body[loc.index].stmt;
  }
  const IrMethod& method_of(NodeId n) const { return cls_.methods[nodes_.at(n).method]; }

  bool is_entry(NodeId n) const { return std::binary_search(entries_.begin(), entries_.end(), n); }

  // Edges (s, n), ordered by source node then edge kind.
  const std::vector<std::size_t>& incoming(NodeId n) const {
    check(n);
    return incoming_[n];
  }
  const std::vector<std::size_t>& outgoing(NodeId n) const {
    check(n);
    return outgoing_[n];
  }

  std::vector<NodeId> predecessors(NodeId n) const {
    std::vector<NodeId> out;
    for (auto e : incoming(n)) out.push_back(edges_[e].src);
    return out;
  }
  std::vector<NodeId> successors(NodeId n) const {
    std::vector<NodeId> out;
    for (auto e : outgoing(n)) out.push_back(edges_[e].dst);
    return out;
  }

  std::string node_name(NodeId n) const {
    const auto& loc = nodes_.at(n);
    return cls_.name + "." + cls_.methods[loc.method].name + "#" + std::to_string(loc.index);
  }

  std::string dump() const {
    std::ostringstream os;
    for (const auto& e : edges_)
      os << node_name(e.src) << " -> " << node_name(e.dst) << " [" << to_string(e.kind) << "]\n";
    return os.str();
  }

 private:
  friend TrimmedIcfg build_trimmed_icfg(const IrClass& cls);

  void check(NodeId n) const {
    if (!contains(n))
      throw std::invalid_argument("node " + std::to_string(n) + " is not in the ICFG of " +
                                  cls_.name);
  }

  IrClass cls_;
  std::vector<std::size_t> offsets_;
  std::vector<IcfgNode> nodes_;
  std::vector<IcfgEdge> edges_;
  std::vector<NodeId> entries_;
  std::vector<std::vector<std::size_t>> incoming_;
  std::vector<std::vector<std::size_t>> outgoing_;
  std::vector<std::string> diagnostics_;
};

// Qualified names (`Other.m`) leave the class; an unqualified name that the
// class does not define is kept opaque and reported.
inline TrimmedIcfg build_trimmed_icfg(const IrClass& cls) {
  TrimmedIcfg g(cls);
  for (std::size_t m = 0; m < cls.methods.size(); ++m) {
    g.offsets_.push_back(g.nodes_.size());
    for (std::size_t i = 0; i < cls.methods[m].body.size(); ++i) g.nodes_.push_back({m, i});
  }

  auto id = [&](std::size_t m, std::size_t i) { return g.offsets_[m] + i; };
  auto label = [&](std::size_t m, const std::string& l) {
    auto idx = cls.methods[m].label_index(l);
    if (!idx) throw std::invalid_argument("undefined label '" + l + "' in " + cls.name);
    return id(m, *idx);
  };

  for (std::size_t m = 0; m < cls.methods.size(); ++m) {
    const auto& body = cls.methods[m].body;
    if (!body.empty()) g.entries_.push_back(id(m, 0));
    for (std::size_t i = 0; i < body.size(); ++i) {
      const NodeId self = id(m, i);
      const bool has_next = i + 1 < body.size();
      const IrStmt& s = body[i].stmt;
      if (const auto* go = std::get_if<GotoStmt>(&s)) {
        g.edges_.push_back({self, label(m, go->label), EdgeKind::Fallthrough});
      } else if (const auto* br = std::get_if<BranchStmt>(&s)) {
        g.edges_.push_back({self, label(m, br->on_true), EdgeKind::BranchTrue});
        g.edges_.push_back({self, label(m, br->on_false), EdgeKind::BranchFalse});
      } else if (std::holds_alternative<ReturnStmt>(s)) {
        // call-return edges are added from the call sites
      } else if (const auto* inv = std::get_if<InvokeStmt>(&s)) {
        auto callee = inv->method.find('.') == std::string::npos ? cls.method_index(inv->method)
                                                                  : std::nullopt;
        if (callee && !cls.methods[*callee].body.empty()) {
          g.edges_.push_back({self, id(*callee, 0), EdgeKind::CallEntry});
          if (has_next) {
            const auto& cbody = cls.methods[*callee].body;
            for (std::size_t r = 0; r < cbody.size(); ++r)
              if (std::holds_alternative<ReturnStmt>(cbody[r].stmt))
                g.edges_.push_back({id(*callee, r), id(m, i + 1), EdgeKind::CallReturn});
          }
        } else {
          if (inv->method.find('.') == std::string::npos)
            g.diagnostics_.push_back(g.node_name(self) + ": invoke of undefined method '" +
                                     inv->method + "' treated as external call");
          if (has_next) g.edges_.push_back({self, id(m, i + 1), EdgeKind::Fallthrough});
        }
      } else if (has_next) {
        g.edges_.push_back({self, id(m, i + 1), EdgeKind::Fallthrough});
      }
    }
  }

  std::sort(g.edges_.begin(), g.edges_.end());
  g.incoming_.assign(g.nodes_.size(), {});
  g.outgoing_.assign(g.nodes_.size(), {});
  for (std::size_t e = 0; e < g.edges_.size(); ++e) {
    g.outgoing_[g.edges_[e].src].push_back(e);
    g.incoming_[g.edges_[e].dst].push_back(e);
  }
  // edges_ is sorted by (src, dst, kind): incoming lists are ordered by
  // (src, kind) already; outgoing by (dst, kind).
  return g;
}

// Back edges found by iterative DFS from the entry points in node order.
inline std::vector<IcfgEdge> back_edges(const TrimmedIcfg& g) {
  enum Color : unsigned char { White, Grey, Black };
  std::vector<Color> color(g.size(), White);
  std::vector<IcfgEdge> out;
  for (NodeId root : g.entry_points()) {
    if (color[root] != White) continue;
    std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
    color[root] = Grey;
    while (!stack.empty()) {
      auto& [n, k] = stack.back();
      const auto& outs = g.outgoing(n);
      if (k == outs.size()) {
        color[n] = Black;
        stack.pop_back();
        continue;
      }
      const IcfgEdge& e = g.edges()[outs[k++]];
      if (color[e.dst] == Grey) {
        out.push_back(e);
      } else if (color[e.dst] == White) {
        color[e.dst] = Grey;
        stack.emplace_back(e.dst, 0);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace confcompat
