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

#include <confcompat/cli.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace confcompat::cli;
  CLI::App app{"Extract configuration compatibility rules and scan apps against them"};
  app.require_subcommand(1);

  ExtractArgs ex;
  std::string spec_path;
  auto* extract = app.add_subcommand("extract", "Diff snapshots into a rule file");
  extract->add_option("--snapshots", ex.snapshots, "Directory of .snap files")
      ->required()
      ->envname("CONFCOMPAT_SNAPSHOTS");
  extract->add_option("--out", ex.out, "Rule file to write")->required()->envname("CONFCOMPAT_OUT");
  extract->add_option("--budget", ex.budgets.solver_steps, "Solver step budget per query")
      ->envname("CONFCOMPAT_BUDGET");
  extract->add_option("--max-expansions", ex.budgets.max_expansions, "Worklist budget per target")
      ->envname("CONFCOMPAT_MAX_EXPANSIONS");
  extract->add_option("--spec", spec_path, "Configuration API format table")
      ->envname("CONFCOMPAT_SPEC");

  ConstraintsArgs cs;
  auto* constraints = app.add_subcommand("constraints", "Print the constraints of one class");
  constraints->add_option("--snapshot", cs.snapshot, "Snapshot file")->required()->envname("CONFCOMPAT_SNAPSHOT");
  constraints->add_option("--class", cs.class_name, "Class name")->required()->envname("CONFCOMPAT_CLASS");
  constraints->add_option("--budget", cs.budgets.solver_steps, "Solver step budget per query")
      ->envname("CONFCOMPAT_BUDGET");
  constraints->add_option("--max-expansions", cs.budgets.max_expansions, "Worklist budget per target")
      ->envname("CONFCOMPAT_MAX_EXPANSIONS");
  constraints->add_option("--spec", spec_path, "Configuration API format table")
      ->envname("CONFCOMPAT_SPEC");
  constraints->add_flag("--dump-icfg", cs.dump_icfg, "Print the class graph to stderr");
  constraints->add_flag("--dump-pi", cs.dump_paths, "Print path constraints to stderr");

  OracleArgs orc;
  auto* oracle = app.add_subcommand("oracle", "Constraints of one class by forward enumeration");
  oracle->add_option("--snapshot", orc.snapshot, "Snapshot file")->required()->envname("CONFCOMPAT_SNAPSHOT");
  oracle->add_option("--class", orc.class_name, "Class name")->required()->envname("CONFCOMPAT_CLASS");
  oracle->add_option("--max-states", orc.options.max_states, "State budget")
      ->envname("CONFCOMPAT_MAX_STATES");
  oracle->add_option("--spec", spec_path, "Configuration API format table")
      ->envname("CONFCOMPAT_SPEC");

  ScanArgs sc;
  bool no_v = false, no_lib = false;
  std::string prefixes;
  auto* scan = app.add_subcommand("scan", "Scan an app's resources against a rule file");
  scan->add_option("--rules", sc.rules, "Rule file")->required()->envname("CONFCOMPAT_RULES");
  scan->add_option("--app", sc.app, "App directory")->required()->envname("CONFCOMPAT_APP");
  scan->add_option("--out", sc.out, "Report file to write")->required()->envname("CONFCOMPAT_OUT");
  scan->add_flag("--no-filter-v", no_v, "Keep warnings on files unusable at a rule level")
      ->envname("CONFCOMPAT_NO_FILTER_V");
  scan->add_flag("--no-filter-lib", no_lib, "Keep warnings on library-handled files")
      ->envname("CONFCOMPAT_NO_FILTER_LIB");
  scan->add_option("--lib-prefixes", prefixes, "File of library tag prefixes")
      ->envname("CONFCOMPAT_LIB_PREFIXES");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kError;
  }

  std::optional<std::string> spec;
  if (!spec_path.empty()) spec = spec_path;
  if (*extract) {
    ex.spec = spec;
    return cmd_extract(ex, std::cout, std::cerr);
  }
  if (*constraints) {
    cs.spec = spec;
    return cmd_constraints(cs, std::cout, std::cerr);
  }
  if (*oracle) {
    orc.spec = spec;
    return cmd_oracle(orc, std::cout, std::cerr);
  }
  sc.filter_v = !no_v;
  sc.filter_lib = !no_lib;
  if (!prefixes.empty()) sc.lib_prefixes = prefixes;
  return cmd_scan(sc, std::cout, std::cerr);
}
