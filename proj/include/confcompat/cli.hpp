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

// Commands behind the `confcompat` tool. Each returns the process exit code:
// 0 success (for scan: no surviving warnings), 1 scan warnings, 2 error.

#include <confcompat/appscan.hpp>
#include <confcompat/oracle.hpp>
#include <confcompat/parser.hpp>
#include <confcompat/refine.hpp>
#include <confcompat/rulegen.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace confcompat::cli {

inline constexpr int kOk = 0;
inline constexpr int kWarnings = 1;
inline constexpr int kError = 2;

struct Budgets {
  std::size_t solver_steps = 1'000'000;
  std::size_t max_expansions = 50'000;

  ExtractOptions extract_options() const {
    ExtractOptions o;
    o.engine.max_expansions = max_expansions;
    o.refine.solver_budget = solver_steps;
    return o;
  }
};

inline ConfigApiSpec load_spec(const std::optional<std::string>& path) {
  if (!path) return default_config_api_spec();
  return parse_config_api_spec(read_file(*path));
}

inline FrameworkSnapshot load_snapshot(const std::filesystem::path& p) {
  try {
    return parse_snapshot(read_file(p));
  } catch (const ParseError& e) {
    throw std::runtime_error(p.string() + ": " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScanError("cannot write " + path);
  out << text;
  if (!out) throw ScanError("write failed for " + path);
}

inline void print_constraints(std::ostream& out, const std::vector<ConfigConstraint>& cs) {
  for (const auto& c : cs) out << to_string(c) << "\n";
}

struct ExtractArgs {
  std::string snapshots;
  std::string out;
  std::optional<std::string> spec;
  Budgets budgets;
};

inline int cmd_extract(const ExtractArgs& a, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  try {
    if (!fs::is_directory(a.snapshots)) {
      err << "error: snapshot directory " << a.snapshots << " does not exist\n";
      return kError;
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(a.snapshots))
      if (e.is_regular_file() && e.path().extension() == ".snap") files.push_back(e.path());
    std::sort(files.begin(), files.end());

    const ConfigApiSpec spec = load_spec(a.spec);
    std::map<int, FrameworkSnapshot> snaps;
    bool parse_failed = false;
    for (const auto& f : files) {
      try {
        auto s = load_snapshot(f);
        if (snaps.count(s.api_level)) {
          err << "error: " << f.string() << ": level " << s.api_level << " appears twice\n";
          return kError;
        }
        snaps.emplace(s.api_level, std::move(s));
      } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << "\n";
        parse_failed = true;
      }
    }
    if (parse_failed) return kError;
    if (snaps.size() < 2) {
      err << "usage error: extract needs at least two snapshots with distinct levels in "
          << a.snapshots << "\n";
      return kError;
    }

    ConstraintsByLevel by_level;
    for (const auto& [level, snap] : snaps) {
      auto r = extract_all_constraints(snap, spec, a.budgets.extract_options());
      out << "level " << level << ": " << r.constraints.size() << " constraints from " << r.targets
          << " targets, " << r.diagnostics.size() << " discarded\n";
      for (const auto& d : r.diagnostics) out << "  " << to_string(d) << "\n";
      by_level[level] = std::move(r.constraints);
    }
    auto rules = generate_rules(by_level);
    write_text(a.out, write_rules(rules));
    out << rules.size() << " rules written to " << a.out << "\n";
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

struct ConstraintsArgs {
  std::string snapshot;
  std::string class_name;
  std::optional<std::string> spec;
  Budgets budgets;
  bool dump_icfg = false;
  bool dump_paths = false;
};

inline int cmd_constraints(const ConstraintsArgs& a, std::ostream& out, std::ostream& err) {
  try {
    const auto snap = load_snapshot(a.snapshot);
    const IrClass* cls = snap.find_class(a.class_name);
    if (!cls) {
      err << "error: no class named " << a.class_name << " in " << a.snapshot << "\n";
      return kError;
    }
    const ConfigApiSpec spec = load_spec(a.spec);
    if (a.dump_icfg || a.dump_paths) {
      TrimmedIcfg g = build_trimmed_icfg(*cls);
      if (a.dump_icfg) err << g.dump();
      for (const auto& d : g.diagnostics()) err << "note: " << d << "\n";
      if (a.dump_paths)
        for (NodeId n = 0; n < g.size(); ++n) {
          if (!std::holds_alternative<TargetStmt>(g.stmt(n))) continue;
          auto px = extract_path_constraints(g, n, a.budgets.extract_options().engine);
          for (const auto& pi : px.paths)
            err << pi.target_site << " <- " << pi.entry_site << ": " << to_string(pi.formula) << "\n";
        }
    }
    auto r = extract_class_constraints(snap, a.class_name, spec, a.budgets.extract_options());
    for (const auto& d : r.diagnostics) err << "discarded: " << to_string(d) << "\n";
    print_constraints(out, r.constraints);
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

struct OracleArgs {
  std::string snapshot;
  std::string class_name;
  std::optional<std::string> spec;
  OracleOptions options;
};

inline int cmd_oracle(const OracleArgs& a, std::ostream& out, std::ostream& err) {
  try {
    const auto snap = load_snapshot(a.snapshot);
    if (!snap.find_class(a.class_name)) {
      err << "error: no class named " << a.class_name << " in " << a.snapshot << "\n";
      return kError;
    }
    auto r = forward_oracle(snap, a.class_name, load_spec(a.spec), a.options);
    if (r.refused) {
      err << "oracle refused: " << r.reason << "\n";
      return kError;
    }
    print_constraints(out, r.constraints);
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

struct ScanArgs {
  std::string rules;
  std::string app;
  std::string out;
  bool filter_v = true;
  bool filter_lib = true;
  std::optional<std::string> lib_prefixes;
};

inline int cmd_scan(const ScanArgs& a, std::ostream& out, std::ostream& err) {
  try {
    auto rules = parse_rules(read_file(a.rules));
    AppBundle bundle = load_bundle(a.app);
    ScanOptions opts;
    opts.filter_v = a.filter_v;
    opts.filter_lib = a.filter_lib;
    if (a.lib_prefixes) opts.lib_prefixes = parse_lib_prefixes(read_file(*a.lib_prefixes));
    ScanReport r = scan(bundle, rules, opts);
    for (const auto& d : r.diagnostics) err << "warning: " << d << "\n";
    write_text(a.out, write_report(r));
    out << "D=" << r.d << " F_v=" << r.removed_v << " F_lib=" << r.removed_lib
        << " final=" << r.final_count() << "\n";
    for (const auto& w : r.final_warnings())
      out << w.file << ":" << w.line << ": <" << w.tag << "> " << w.attribute << "=\"" << w.value
          << "\" " << rule_id(w.rule) << "\n";
    return r.final_count() > 0 ? kWarnings : kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

}  // namespace confcompat::cli
