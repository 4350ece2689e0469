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

// Path constraints to configuration constraints {attribute, tag, format}.

#include <confcompat/icfg.hpp>
#include <confcompat/solver.hpp>
#include <confcompat/symexec.hpp>

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace confcompat {

enum class DataFormat {
  Int,
  Bool,
  Float,
  String,
  Dimension,
  StyledInt,
  StyledBool,
  StyledFloat,
  StyledString,
  StyledDimension,
};

inline constexpr std::array<DataFormat, 10> kAllFormats = {
    DataFormat::Int,          DataFormat::Bool,         DataFormat::Float,
    DataFormat::String,       DataFormat::Dimension,    DataFormat::StyledInt,
    DataFormat::StyledBool,   DataFormat::StyledFloat,  DataFormat::StyledString,
    DataFormat::StyledDimension};

inline const char* to_string(DataFormat f) {
  switch (f) {
    case DataFormat::Int: return "int";
    case DataFormat::Bool: return "bool";
    case DataFormat::Float: return "float";
    case DataFormat::String: return "string";
    case DataFormat::Dimension: return "dimension";
    case DataFormat::StyledInt: return "styled_int";
    case DataFormat::StyledBool: return "styled_bool";
    case DataFormat::StyledFloat: return "styled_float";
    case DataFormat::StyledString: return "styled_string";
    case DataFormat::StyledDimension: return "styled_dimension";
  }
  return "?";
}

inline std::optional<DataFormat> parse_format(std::string_view s) {
  for (auto f : kAllFormats)
    if (s == to_string(f)) return f;
  return std::nullopt;
}

inline bool is_styled(DataFormat f) { return f >= DataFormat::StyledInt; }

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration API name -> formats it can load.
struct ConfigApiSpec {
  std::map<std::string, std::set<DataFormat>> formats;

  const std::set<DataFormat>* find(const std::string& api) const {
    auto it = formats.find(api);
    if (it != formats.end()) return &it->second;
    // "Resources.getColor" resolves to "getColor".
    auto dot = api.rfind('.');
    if (dot != std::string::npos) {
      it = formats.find(api.substr(dot + 1));
      if (it != formats.end()) return &it->second;
    }
    return nullptr;
  }
};

inline ConfigApiSpec default_config_api_spec() {
  using F = DataFormat;
  ConfigApiSpec s;
  s.formats = {
      {"getAttributeIntValue", {F::Int}},
      {"getAttributeBooleanValue", {F::Bool}},
      {"getAttributeValue", {F::String}},
      {"getColor", {F::Int, F::StyledInt}},
      {"getBoolean", {F::Bool, F::StyledBool}},
      {"getString", {F::String, F::StyledString}},
      {"getDimension", {F::Dimension, F::StyledDimension}},
      {"getFloat", {F::Float, F::StyledFloat}},
  };
  return s;
}

// `api-name: fmt1, fmt2` per line; `#` starts a comment.
inline ConfigApiSpec parse_config_api_spec(std::string_view text) {
  ConfigApiSpec s;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  auto trim = [](std::string x) {
    auto b = x.find_first_not_of(" \t\r");
    auto e = x.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : x.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos)
      throw ConfigError("config api spec line " + std::to_string(lineno) + ": missing ':'");
    std::string api = trim(line.substr(0, colon));
    if (api.empty())
      throw ConfigError("config api spec line " + std::to_string(lineno) + ": empty api name");
    if (s.formats.count(api))
      throw ConfigError("config api spec line " + std::to_string(lineno) + ": duplicate api " + api);
    auto& set = s.formats[api];
    std::istringstream fmts(line.substr(colon + 1));
    std::string tok;
    while (std::getline(fmts, tok, ',')) {
      tok = trim(tok);
      auto f = parse_format(tok);
      if (!f)
        throw ConfigError("config api spec line " + std::to_string(lineno) + ": unknown format '" +
                          tok + "'");
      set.insert(*f);
    }
    if (set.empty())
      throw ConfigError("config api spec line " + std::to_string(lineno) + ": no formats for " + api);
  }
  return s;
}

struct ConfigConstraint {
  std::string attribute;
  std::string xml_tag;
  DataFormat format = DataFormat::Int;
  int api_level = 0;
  std::string provenance;  // "Class.method#index"

  auto identity() const { return std::tie(attribute, xml_tag, format); }
  bool operator==(const ConfigConstraint& o) const { return identity() == o.identity(); }
  bool operator<(const ConfigConstraint& o) const { return identity() < o.identity(); }
};

// `{android:color, item, int} @ 22`
inline std::string to_string(const ConfigConstraint& c) {
  return "{" + c.attribute + ", " + c.xml_tag + ", " + to_string(c.format) + "} @ " +
         std::to_string(c.api_level);
}

// R.attr.color -> android:color
inline std::string render_attribute(const std::string& const_name) {
  constexpr std::string_view prefix = "R.attr.";
  if (const_name.rfind(prefix, 0) == 0) return "android:" + const_name.substr(prefix.size());
  return const_name;
}

inline bool is_get_name(const std::string& api) {
  return api == "getName" ||
         (api.size() > 8 && api.compare(api.size() - 8, 8, ".getName") == 0);
}

struct Diagnostic {
  enum class Kind {
    EngineBudget,   // symbolic execution gave up on a target
    SolverBudget,   // check_sat ran out of steps
    Undecidable,    // enumeration ran out of steps
    NotClosed,      // a witness value satisfies the constraint
    Unresolved,     // attribute value is not a declared attribute id, or tag not a string
  };
  Kind kind;
  std::string site;
  std::string message;

  bool over_budget() const {
    return kind == Kind::EngineBudget || kind == Kind::SolverBudget || kind == Kind::Undecidable;
  }
};

inline const char* to_string(Diagnostic::Kind k) {
  switch (k) {
    case Diagnostic::Kind::EngineBudget: return "engine-budget";
    case Diagnostic::Kind::SolverBudget: return "solver-budget";
    case Diagnostic::Kind::Undecidable: return "undecidable";
    case Diagnostic::Kind::NotClosed: return "not-closed";
    case Diagnostic::Kind::Unresolved: return "unresolved";
  }
  return "?";
}

inline std::string to_string(const Diagnostic& d) {
  return d.site + ": " + to_string(d.kind) + ": " + d.message;
}

struct RefineOptions {
  std::size_t solver_budget = 1'000'000;
};

struct RefineResult {
  std::vector<ConfigConstraint> constraints;
  std::optional<Diagnostic> discarded;
  bool unsat = false;
};

inline RefineResult refine_acc(const PathConstraint& pi, const ConfigApiSpec& spec,
                               const FrameworkSnapshot& snap, const RefineOptions& opts = {}) {
  RefineResult out;
  const IrClass* cls = snap.find_class(pi.class_name);
  if (!cls) throw std::invalid_argument("path constraint for unknown class " + pi.class_name);

  std::string api;
  visit_targets(pi.formula, [&](const TargetAtom& a) {
    if (api.empty()) api = a.api;
  });
  if (api.empty()) throw std::invalid_argument(pi.target_site + ": path constraint has no target");
  const auto* formats = spec.find(api);
  if (!formats) throw ConfigError(pi.target_site + ": configuration API '" + api + "' is not in the spec");

  auto discard = [&](Diagnostic::Kind k, std::string msg) {
    out.discarded = Diagnostic{k, pi.target_site, std::move(msg)};
    return out;
  };

  Symbolized sym = symbolize(pi.formula, snap.attr_consts);
  SolverQuery q;
  q.formula = sym.formula;
  q.budget = opts.solver_budget;
  q.pool = class_constant_pool(*cls, snap.attr_consts);

  // Infeasible chains are dropped so their tag reads do not count.
  std::vector<Formula> feasible;
  for (const auto& d : detail::disjuncts(sym.formula)) {
    SolverQuery one = q;
    one.formula = d;
    auto sat = check_sat(one);
    if (sat.status == SolverOutcome::Status::BudgetExceeded)
      return discard(Diagnostic::Kind::SolverBudget, "satisfiability check exceeded the step budget");
    if (sat.status == SolverOutcome::Status::Sat) feasible.push_back(d);
  }
  if (feasible.empty()) {
    out.unsat = true;
    return out;
  }
  q.formula = formula::disj(feasible);
  const auto live = detail::free_vars(q.formula);

  q.focus = Focus::target_attribute();
  auto avals = enumerate_values(q);
  if (avals.status == ValueSet::Status::Undecidable)
    return discard(Diagnostic::Kind::Undecidable, "attribute enumeration exceeded the step budget");
  if (!avals.closed) return discard(Diagnostic::Kind::NotClosed, "attribute is unconstrained");
  std::vector<std::string> attributes;
  for (const auto& v : avals.values) {
    auto name = is_int(v) ? snap.attr_name_for(std::get<std::int64_t>(v)) : std::nullopt;
    if (!name)
      return discard(Diagnostic::Kind::Unresolved,
                     "attribute value " + to_string(v) + " is not a declared attribute");
    attributes.push_back(render_attribute(*name));
  }

  std::set<std::string> tags;
  bool has_get_name = false;
  for (const auto& [var, orig] : sym.symbols) {
    if (orig->kind != TermKind::Api || !is_get_name(orig->name)) continue;
    if (std::find(live.begin(), live.end(), var) == live.end()) continue;
    has_get_name = true;
    q.focus = Focus::of(term::var(var));
    auto xs = enumerate_values(q);
    if (xs.status == ValueSet::Status::Undecidable)
      return discard(Diagnostic::Kind::Undecidable, "tag enumeration exceeded the step budget");
    if (!xs.closed) return discard(Diagnostic::Kind::NotClosed, "tag is unconstrained");
    for (const auto& v : xs.values) {
      if (!is_str(v))
        return discard(Diagnostic::Kind::Unresolved, "tag value " + to_string(v) + " is not a string");
      tags.insert(std::get<std::string>(v));
    }
  }
  if (!has_get_name) tags.insert(pi.class_name);

  for (const auto& a : attributes)
    for (const auto& x : tags)
      for (auto f : *formats) out.constraints.push_back({a, x, f, snap.api_level, pi.target_site});
  return out;
}

struct ExtractOptions {
  EngineOptions engine;
  RefineOptions refine;
};

struct ExtractionResult {
  std::vector<ConfigConstraint> constraints;  // sorted, deduplicated
  std::vector<Diagnostic> diagnostics;
  std::size_t targets = 0;
  std::size_t paths = 0;
};

inline void finalize_constraints(std::vector<ConfigConstraint>& cs) {
  std::stable_sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
}

inline void extract_class_constraints(const FrameworkSnapshot& snap, const IrClass& cls,
                                      const ConfigApiSpec& spec, const ExtractOptions& opts,
                                      ExtractionResult& out) {
  TrimmedIcfg g = build_trimmed_icfg(cls);
  for (NodeId n = 0; n < g.size(); ++n) {
    if (!std::holds_alternative<TargetStmt>(g.stmt(n))) continue;
    ++out.targets;
    auto px = extract_path_constraints(g, n, opts.engine);
    if (px.budget_exceeded) {
      out.diagnostics.push_back({Diagnostic::Kind::EngineBudget, g.node_name(n),
                                 "expansion budget exceeded, target skipped"});
      continue;
    }
    for (const auto& pi : px.paths) {
      ++out.paths;
      auto r = refine_acc(pi, spec, snap, opts.refine);
      if (r.discarded) out.diagnostics.push_back(*r.discarded);
      out.constraints.insert(out.constraints.end(), r.constraints.begin(), r.constraints.end());
    }
  }
}

inline ExtractionResult extract_class_constraints(const FrameworkSnapshot& snap,
                                                  const std::string& class_name,
                                                  const ConfigApiSpec& spec,
                                                  const ExtractOptions& opts = {}) {
  const IrClass* cls = snap.find_class(class_name);
  if (!cls) throw std::invalid_argument("no class named " + class_name);
  ExtractionResult out;
  extract_class_constraints(snap, *cls, spec, opts, out);
  finalize_constraints(out.constraints);
  return out;
}

inline ExtractionResult extract_all_constraints(const FrameworkSnapshot& snap,
                                                const ConfigApiSpec& spec,
                                                const ExtractOptions& opts = {}) {
  ExtractionResult out;
  for (const auto& cls : snap.classes) extract_class_constraints(snap, cls, spec, opts, out);
  finalize_constraints(out.constraints);
  return out;
}

}  // namespace confcompat
