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


#include "support/generators.hpp"

#include <confcompat/rulegen.hpp>

#include <catch_amalgamated.hpp>

#include <set>

using namespace confcompat;

namespace {

ConfigConstraint cc(std::string a, std::string x, DataFormat f, int level = 0) {
  return {std::move(a), std::move(x), f, level, ""};
}

std::vector<ConfigConstraint> random_constraints(testgen::Rng& rng) {
  std::vector<ConfigConstraint> out;
  const int n = testgen::uniform(rng, 0, 6);
  for (int k = 0; k < n; ++k)
    out.push_back(cc(testgen::pick(rng, {"android:color", "android:gravity"}),
                     testgen::pick(rng, {"item", "LayerDrawable"}),
                     kAllFormats[static_cast<std::size_t>(testgen::uniform(rng, 0, 3))]));
  return out;
}

std::set<DataFormat> formats_of(const std::vector<ConfigConstraint>& cs, const std::string& a,
                                const std::string& x) {
  std::set<DataFormat> out;
  for (const auto& c : cs)
    if (c.attribute == a && c.xml_tag == x) out.insert(c.format);
  return out;
}

}  // namespace

TEST_CASE("styled format introduced between two levels") {
  ConstraintsByLevel by_level{
      {22, {cc("android:color", "item", DataFormat::Int, 22)}},
      {23, {cc("android:color", "item", DataFormat::Int, 23), cc("android:color", "item", DataFormat::StyledInt, 23)}},
  };
  auto rules = generate_rules(by_level);
  REQUIRE(rules.size() == 1);
  CHECK(rule_id(rules[0]) == "format_change/android:color/item/styled_int/22-23");
  CHECK(to_json_line(rules[0]) ==
        R"({"kind":"format_change","attribute":"android:color","tag":"item","format":"styled_int","levels":[22,23]})");
}

TEST_CASE("attribute loaded from a later level") {
  ConstraintsByLevel by_level{
      {22, {cc("android:left", "LayerDrawable", DataFormat::Dimension)}},
      {23,
       {cc("android:left", "LayerDrawable", DataFormat::Dimension),
        cc("android:gravity", "LayerDrawable", DataFormat::Int)}},
  };
  auto rules = generate_rules(by_level);
  REQUIRE(rules.size() == 1);
  CHECK(to_json_line(rules[0]) ==
        R"({"kind":"loading_change","attribute":"android:gravity","tag":"LayerDrawable","levels":[22,23],"direction":"introduced"})");
  CHECK(rule_id(rules[0]) == "loading_change/android:gravity/LayerDrawable/22-23/introduced");
}

TEST_CASE("a vanished pair is one loading rule") {
  ConstraintsByLevel by_level{
      {21, {cc("a", "t", DataFormat::Int), cc("a", "t", DataFormat::StyledInt)}},
      {22, {}},
  };
  auto rules = generate_rules(by_level);
  REQUIRE(rules.size() == 1);
  CHECK(rules[0].kind == RuleKind::LoadingChange);
  CHECK(rules[0].direction == Direction::Removed);
}

TEST_CASE("only adjacent levels are compared") {
  ConstraintsByLevel by_level{
      {21, {cc("a", "t", DataFormat::Int)}},
      {22, {cc("a", "t", DataFormat::Int)}},
      {23, {cc("a", "t", DataFormat::Bool)}},
  };
  auto rules = generate_rules(by_level);
  REQUIRE(rules.size() == 2);
  for (const auto& r : rules) {
    CHECK(r.l1 == 22);
    CHECK(r.l2 == 23);
    CHECK(r.kind == RuleKind::FormatChange);
  }
  CHECK_THROWS_AS(generate_rules({{21, {}}}), std::invalid_argument);
}

TEST_CASE("rule laws on random constraint sets") {
  testgen::Rng rng(777);
  const std::vector<std::string> attrs = {"android:color", "android:gravity"};
  const std::vector<std::string> tags = {"item", "LayerDrawable"};
  for (int k = 0; k < 500; ++k) {
    auto s1 = random_constraints(rng), s2 = random_constraints(rng);
    auto fwd = generate_rules({{1, s1}, {2, s2}});
    auto back = generate_rules({{1, s2}, {2, s1}});

    CHECK(generate_rules({{1, s1}, {2, s1}}).empty());
    CHECK(std::is_sorted(fwd.begin(), fwd.end()));

    // Swapping the sides flips directions only.
    auto flipped = back;
    for (auto& r : flipped)
      if (r.direction)
        r.direction = *r.direction == Direction::Introduced ? Direction::Removed : Direction::Introduced;
    std::sort(flipped.begin(), flipped.end());
    CHECK(flipped == fwd);

    // A rule exists exactly where the sets differ.
    std::set<std::string> expected;
    for (const auto& a : attrs)
      for (const auto& x : tags) {
        auto f1 = formats_of(s1, a, x), f2 = formats_of(s2, a, x);
        if (f1.empty() != f2.empty()) {
          expected.insert("loading_change/" + a + "/" + x + "/1-2/" +
                          (f1.empty() ? "introduced" : "removed"));
        } else {
          for (auto f : kAllFormats)
            if (f1.count(f) != f2.count(f))
              expected.insert("format_change/" + a + "/" + x + "/" + to_string(f) + "/1-2");
        }
      }
    std::set<std::string> got;
    for (const auto& r : fwd) got.insert(rule_id(r));
    CHECK(got == expected);
    CHECK(got.size() == fwd.size());

    CHECK(parse_rules(write_rules(fwd)) == fwd);
  }
}

TEST_CASE("rule parsing rejects malformed lines") {
  const std::string good =
      R"({"kind":"format_change","attribute":"a","tag":"t","format":"int","levels":[1,2]})";
  CHECK(parse_rules(good + "\n\n").size() == 1);
  auto bad = [](const std::string& line) { CHECK_THROWS_AS(parse_rules(line), RuleFormatError); };
  bad("{");
  bad(R"({"kind":"other","attribute":"a","tag":"t","levels":[1,2]})");
  bad(R"({"kind":"format_change","attribute":"a","tag":"t","levels":[1,2]})");
  bad(R"({"kind":"format_change","attribute":"a","tag":"t","format":"colour","levels":[1,2]})");
  bad(R"({"kind":"format_change","attribute":"a","tag":"t","format":"int","levels":[2,1]})");
  bad(R"({"kind":"format_change","attribute":"a","tag":"t","format":"int","levels":[1]})");
  bad(R"({"kind":"loading_change","attribute":"a","tag":"t","levels":[1,2]})");
  bad(R"({"kind":"loading_change","attribute":"a","tag":"t","levels":[1,2],"direction":"up"})");
  bad(R"({"kind":"loading_change","tag":"t","levels":[1,2],"direction":"removed"})");
  bad(R"({"kind":"loading_change","attribute":1,"tag":"t","levels":[1,2],"direction":"removed"})");
  try {
    parse_rules(good + "\n{");
    FAIL("expected a parse error");
  } catch (const RuleFormatError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}
