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

// Reference solver: full-grid enumeration over an independently built domain.

#include <confcompat/formula.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace confcompat::testgen {

struct GridDomain {
  std::vector<Value> values;
  Value int_witness;
  Value str_witness;
};

struct GridConstants {
  std::set<std::int64_t> ints{0};
  std::set<std::string> strings;
  std::set<std::string> vars;
};

inline void grid_scan(const Term& t, GridConstants& c) {
  if (t->kind == TermKind::Int) c.ints.insert(t->value);
  if (t->kind == TermKind::Str || t->kind == TermKind::StrEq) c.strings.insert(t->name);
  if (t->kind == TermKind::Var) c.vars.insert(t->name);
  for (const auto& a : t->args) grid_scan(a, c);
}

inline void grid_scan(const Formula& f, GridConstants& c) {
  if (f->pred) grid_scan(f->pred, c);
  if (f->target) {
    grid_scan(f->target->attribute, c);
    for (const auto& e : f->target->extras) grid_scan(e, c);
  }
  for (const auto& ch : f->children) grid_scan(ch, c);
}

// Constants, then one integer above all of them and one unused string.
inline GridDomain grid_domain(const GridConstants& c) {
  GridDomain d;
  for (auto i : c.ints) d.values.push_back(i);
  for (const auto& s : c.strings) d.values.push_back(s);
  d.int_witness = *c.ints.rbegin() + 1;
  std::string s = "<fresh>";
  while (c.strings.count(s)) s.push_back('\'');
  d.str_witness = s;
  d.values.push_back(d.int_witness);
  d.values.push_back(d.str_witness);
  return d;
}

struct GridResult {
  bool sat = false;
  std::set<Value> focus_values;
  std::size_t assignments = 0;
};

// Evaluates `f` on every assignment of `vars` over `dom` (no API terms).
inline GridResult grid_search(const Formula& f, const std::vector<std::string>& vars,
                              const GridDomain& dom, const std::optional<std::string>& focus) {
  GridResult r;
  std::map<std::string, Value> env;
  Interpretation in;
  in.var = [&](const std::string& n) { return env.at(n); };
  std::vector<std::size_t> digit(vars.size(), 0);
  for (;;) {
    for (std::size_t k = 0; k < vars.size(); ++k) env[vars[k]] = dom.values[digit[k]];
    ++r.assignments;
    if (evaluate(f, in)) {
      r.sat = true;
      if (focus) r.focus_values.insert(env.at(*focus));
    }
    std::size_t k = 0;
    while (k < digit.size() && ++digit[k] == dom.values.size()) digit[k++] = 0;
    if (k == digit.size()) break;
  }
  return r;
}

// Maps witnesses to placeholders so value sets from different domain
// builders compare by role.
inline std::set<std::string> normalize_witnesses(const std::set<Value>& vs, const Value& iw,
                                                 const Value& sw) {
  std::set<std::string> out;
  for (const auto& v : vs) {
    if (v == iw) out.insert("<int-witness>");
    else if (v == sw) out.insert("<str-witness>");
    else out.insert(to_string(v));
  }
  return out;
}

}  // namespace confcompat::testgen
