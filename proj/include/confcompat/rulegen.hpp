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

#include <confcompat/refine.hpp>

#include <json.hpp>

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace confcompat {

enum class RuleKind { LoadingChange, FormatChange };
enum class Direction { Introduced, Removed };

inline const char* to_string(RuleKind k) {
  return k == RuleKind::LoadingChange ? "loading_change" : "format_change";
}
inline const char* to_string(Direction d) {
  return d == Direction::Introduced ? "introduced" : "removed";
}

struct DetectionRule {
  RuleKind kind = RuleKind::LoadingChange;
  std::string attribute;
  std::string xml_tag;
  std::optional<DataFormat> format;  // format_change only
  int l1 = 0;
  int l2 = 0;
  std::optional<Direction> direction;  // loading_change only

  auto sort_key() const { return std::tie(l1, l2, attribute, xml_tag, kind, format, direction); }
  bool operator==(const DetectionRule& o) const { return sort_key() == o.sort_key(); }
  bool operator<(const DetectionRule& o) const { return sort_key() < o.sort_key(); }
};

// format_change/android:color/item/styled_int/22-23
inline std::string rule_id(const DetectionRule& r) {
  std::string id = std::string(to_string(r.kind)) + "/" + r.attribute + "/" + r.xml_tag + "/";
  if (r.format) id += std::string(to_string(*r.format)) + "/";
  id += std::to_string(r.l1) + "-" + std::to_string(r.l2);
  if (r.direction) id += std::string("/") + to_string(*r.direction);
  return id;
}

using ConstraintsByLevel = std::map<int, std::vector<ConfigConstraint>>;

inline std::vector<DetectionRule> generate_rules(const ConstraintsByLevel& by_level) {
  if (by_level.size() < 2) throw std::invalid_argument("rule generation needs at least two levels");
  using Key = std::pair<std::string, std::string>;
  auto index = [](const std::vector<ConfigConstraint>& cs) {
    std::map<Key, std::set<DataFormat>> m;
    for (const auto& c : cs) m[{c.attribute, c.xml_tag}].insert(c.format);
    return m;
  };

  std::vector<DetectionRule> rules;
  for (auto it = by_level.begin(), next = std::next(it); next != by_level.end(); ++it, ++next) {
    const int l1 = it->first, l2 = next->first;
    auto a = index(it->second), b = index(next->second);
    std::set<Key> keys;
    for (const auto& [k, _] : a) keys.insert(k);
    for (const auto& [k, _] : b) keys.insert(k);
    for (const auto& k : keys) {
      auto fa = a.find(k), fb = b.find(k);
      if (fa == a.end() || fb == b.end()) {
        rules.push_back({RuleKind::LoadingChange, k.first, k.second, std::nullopt, l1, l2,
                         fa == a.end() ? Direction::Introduced : Direction::Removed});
        continue;
      }
      for (auto f : kAllFormats)
        if (fa->second.count(f) != fb->second.count(f))
          rules.push_back({RuleKind::FormatChange, k.first, k.second, f, l1, l2, std::nullopt});
    }
  }
  std::sort(rules.begin(), rules.end());
  return rules;
}

// One JSON object per line with a fixed field order.
inline std::string to_json_line(const DetectionRule& r) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(r.kind);
  j["attribute"] = r.attribute;
  j["tag"] = r.xml_tag;
  if (r.format) j["format"] = to_string(*r.format);
  j["levels"] = {r.l1, r.l2};
  if (r.direction) j["direction"] = to_string(*r.direction);
  return j.dump();
}

inline std::string write_rules(const std::vector<DetectionRule>& rules) {
  std::string out;
  for (const auto& r : rules) out += to_json_line(r) + "\n";
  return out;
}

class RuleFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::vector<DetectionRule> parse_rules(const std::string& text) {
  std::vector<DetectionRule> rules;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fail = [&](const std::string& why) {
      return RuleFormatError("rule line " + std::to_string(lineno) + ": " + why);
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw fail(e.what());
    }
    DetectionRule r;
    try {
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "loading_change") r.kind = RuleKind::LoadingChange;
      else if (kind == "format_change") r.kind = RuleKind::FormatChange;
      else throw fail("unknown kind '" + kind + "'");
      r.attribute = j.at("attribute").get<std::string>();
      r.xml_tag = j.at("tag").get<std::string>();
      const auto& lv = j.at("levels");
      if (!lv.is_array() || lv.size() != 2) throw fail("levels must be a pair");
      r.l1 = lv[0].get<int>();
      r.l2 = lv[1].get<int>();
      if (j.contains("format")) {
        auto f = parse_format(j["format"].get<std::string>());
        if (!f) throw fail("unknown format");
        r.format = f;
      }
      if (j.contains("direction")) {
        const std::string d = j["direction"].get<std::string>();
        if (d == "introduced") r.direction = Direction::Introduced;
        else if (d == "removed") r.direction = Direction::Removed;
        else throw fail("unknown direction '" + d + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw fail(e.what());
    }
    if (r.l1 >= r.l2) throw fail("levels must be increasing");
    if ((r.kind == RuleKind::FormatChange) != r.format.has_value())
      throw fail("format is required for format_change and only there");
    if ((r.kind == RuleKind::LoadingChange) != r.direction.has_value())
      throw fail("direction is required for loading_change and only there");
    rules.push_back(std::move(r));
  }
  return rules;
}

}  // namespace confcompat
