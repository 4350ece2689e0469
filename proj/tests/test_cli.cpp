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


#include "support/files.hpp"

#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;
using confcompat::testgen::read_source;
using confcompat::testgen::source_path;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("confcompat_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli(const std::string& args, const std::string& env = "") {
  const fs::path o = scratch() / "stdout.txt", e = scratch() / "stderr.txt";
  std::string cmd = env + (env.empty() ? "" : " ") + "'" + std::string(CONFCOMPAT_CLI) + "' " + args +
                    " >'" + o.string() + "' 2>'" + e.string() + "'";
  int status = std::system(cmd.c_str());
  Outcome r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(o);
  r.err = slurp(e);
  return r;
}

std::string q(const std::string& s) { return "'" + s + "'"; }

}  // namespace

TEST_CASE("extract writes the styled color rule") {
  const auto rules = (scratch() / "csl.rules").string();
  auto r = cli("extract --snapshots " + q(source_path("fixtures/colorstatelist")) + " --out " + q(rules));
  REQUIRE(r.code == 0);
  CHECK(slurp(rules) ==
        "{\"kind\":\"format_change\",\"attribute\":\"android:color\",\"tag\":\"item\","
        "\"format\":\"styled_int\",\"levels\":[22,23]}\n");
  CHECK(r.out.find("level 22: 1 constraints from 1 targets, 0 discarded") != std::string::npos);
  CHECK(r.out.find("level 23: 2 constraints") != std::string::npos);

  const auto again = (scratch() / "csl2.rules").string();
  REQUIRE(cli("extract --snapshots " + q(source_path("fixtures/colorstatelist")) + " --out " + q(again)).code == 0);
  CHECK(slurp(again) == slurp(rules));
}

TEST_CASE("extract needs two levels") {
  const fs::path one = scratch() / "one";
  fs::create_directories(one);
  fs::copy_file(source_path("fixtures/colorstatelist/22.snap"), one / "22.snap",
                fs::copy_options::overwrite_existing);
  auto r = cli("extract --snapshots " + q(one.string()) + " --out " + q((scratch() / "x").string()));
  CHECK(r.code == 2);
  CHECK(r.err.find("two snapshots") != std::string::npos);
  CHECK(cli("extract --snapshots " + q((scratch() / "nope").string()) + " --out x").code == 2);
  CHECK(cli("extract --out x").code == 2);
  CHECK(cli("").code == 2);
}

TEST_CASE("identical snapshots give no rules") {
  const fs::path same = scratch() / "same";
  fs::create_directories(same);
  std::string text = read_source("fixtures/colorstatelist/22.snap");
  std::ofstream(same / "a.snap") << text;
  text.replace(text.find("snapshot 22"), 11, "snapshot 30");
  std::ofstream(same / "b.snap") << text;
  const auto out = (scratch() / "same.rules").string();
  auto r = cli("extract --snapshots " + q(same.string()) + " --out " + q(out));
  CHECK(r.code == 0);
  CHECK(fs::exists(out));
  CHECK(slurp(out).empty());
}

TEST_CASE("snapshot parse errors are reported with the file") {
  const fs::path bad = scratch() / "bad";
  fs::create_directories(bad);
  std::ofstream(bad / "1.snap") << "snapshot 1\nclass C {\n  method m() {\n    x = = 1\n  }\n}\n";
  std::ofstream(bad / "2.snap") << "snapshot 2\n";
  auto r = cli("extract --snapshots " + q(bad.string()) + " --out " + q((scratch() / "bad.rules").string()));
  CHECK(r.code == 2);
  CHECK(r.err.find("1.snap") != std::string::npos);
}

TEST_CASE("constraints and oracle print the same set") {
  for (const char* f : {"colorstatelist/23.snap", "layerdrawable/23.snap"}) {
    const std::string snap = q(source_path(std::string("fixtures/") + f));
    const std::string cls = std::string(f).rfind("color", 0) == 0 ? "ColorStateList" : "LayerDrawable";
    auto back = cli("constraints --snapshot " + snap + " --class " + cls);
    auto fwd = cli("oracle --snapshot " + snap + " --class " + cls);
    CHECK(back.code == 0);
    CHECK(fwd.code == 0);
    CHECK_FALSE(back.out.empty());
    CHECK(back.out == fwd.out);
  }
  auto none = cli("constraints --snapshot " + q(source_path("fixtures/colorstatelist/23.snap")) +
                  " --class Missing");
  CHECK(none.code == 2);
}

TEST_CASE("debug dumps go to stderr") {
  auto r = cli("constraints --snapshot " + q(source_path("fixtures/colorstatelist/22.snap")) +
               " --class ColorStateList --dump-icfg --dump-pi");
  CHECK(r.code == 0);
  CHECK(r.err.find("ColorStateList.inflate#3 -> ColorStateList.inflate#4 [branch-true]") != std::string::npos);
  CHECK(r.err.find("(strEq (call getName (call getXml)) \"item\")") != std::string::npos);
}

TEST_CASE("oracle refuses over its state budget") {
  const std::string snap = q(source_path("fixtures/colorstatelist/22.snap"));
  auto r = cli("oracle --snapshot " + snap + " --class ColorStateList --max-states 1");
  CHECK(r.code == 2);
  CHECK(r.err.find("refused") != std::string::npos);
  CHECK(cli("oracle --snapshot " + snap + " --class ColorStateList", "CONFCOMPAT_MAX_STATES=1").code == 2);
}

TEST_CASE("scan exit codes and counts") {
  const auto rules = (scratch() / "scan.rules").string();
  REQUIRE(cli("extract --snapshots " + q(source_path("fixtures/colorstatelist")) + " --out " + q(rules)).code == 0);
  const auto report = (scratch() / "report.jsonl").string();
  auto scan = [&](const std::string& app, const std::string& flags = "") {
    return cli("scan --rules " + q(rules) + " --app " + q(source_path("fixtures/apps/" + app)) + " --out " +
               q(report) + flags);
  };

  auto hit = scan("timepicker");
  CHECK(hit.code == 1);
  CHECK(hit.out.rfind("D=1 F_v=0 F_lib=0 final=1\n", 0) == 0);
  CHECK(hit.out.find("res/color/time_picker_header_text.xml:6: <item> android:color") != std::string::npos);

  auto shadowed = scan("timepicker_v23");
  CHECK(shadowed.code == 0);
  CHECK(shadowed.out == "D=2 F_v=2 F_lib=0 final=0\n");
  CHECK(slurp(report).find("\"filtered_by\":[\"F_v\"]") != std::string::npos);

  auto unfiltered = scan("timepicker_v23", " --no-filter-v --no-filter-lib");
  CHECK(unfiltered.code == 1);
  CHECK(unfiltered.out.rfind("D=2 F_v=0 F_lib=0 final=2\n", 0) == 0);

  CHECK(scan("timepicker_min23").code == 0);
  CHECK(scan("does_not_exist").code == 2);

  const auto prefixes = (scratch() / "prefixes.txt").string();
  std::ofstream(prefixes) << "selector\nitem\n";
  auto lib = scan("timepicker", " --lib-prefixes " + q(prefixes));
  CHECK(lib.code == 0);
  CHECK(lib.out == "D=1 F_v=0 F_lib=1 final=0\n");
}
