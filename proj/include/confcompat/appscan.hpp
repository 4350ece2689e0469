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

// Matches detection rules against an app's XML resources and removes
// warnings that cannot fire: files unusable at one of the rule's levels (F_v)
// and files handled by a compatibility library (F_lib).

#include <confcompat/rulegen.hpp>
#include <confcompat/xml.hpp>

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace confcompat {

inline constexpr std::string_view kAndroidNs = "http://schemas.android.com/apk/res/android";

class ScanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Manifest {
  int min_sdk = 1;
};

struct ResourceFile {
  std::string path;        // relative to the bundle root, '/'-separated
  std::string res_type;    // directory name without the -vK qualifier
  int qualifier_level = 0;
  std::string logical_name;
  std::optional<xml::Element> root;  // empty if the file failed to parse
};

struct AppBundle {
  Manifest manifest;
  std::vector<ResourceFile> resources;
  std::vector<std::string> diagnostics;

  std::vector<const ResourceFile*> siblings(const ResourceFile& f) const {
    std::vector<const ResourceFile*> out;
    for (const auto& r : resources)
      if (r.res_type == f.res_type && r.logical_name == f.logical_name) out.push_back(&r);
    return out;
  }
  const ResourceFile* find(const std::string& path) const {
    for (const auto& r : resources)
      if (r.path == path) return &r;
    return nullptr;
  }
};

// "color-night-v23" -> {"color-night", 23}
inline std::pair<std::string, int> split_qualifier(const std::string& dir) {
  std::vector<std::string> parts;
  std::stringstream ss(dir);
  std::string p;
  while (std::getline(ss, p, '-')) parts.push_back(p);
  int level = 0;
  std::string type;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& q = parts[i];
    if (i > 0 && q.size() > 1 && q[0] == 'v' &&
        std::all_of(q.begin() + 1, q.end(), [](unsigned char c) { return std::isdigit(c); })) {
      level = std::stoi(q.substr(1));
      continue;
    }
    if (!type.empty()) type += '-';
    type += q;
  }
  return {type, level};
}

inline Manifest parse_manifest(std::string_view text) {
  xml::Element root = xml::parse(text);
  Manifest m;
  std::optional<std::string> raw;
  xml::for_each_element(root, [&](const xml::Element& e) {
    for (const auto& a : e.attributes)
      if (!raw && a.local == "minSdkVersion") raw = a.value;
  });
  if (raw) {
    int v = 0;
    try {
      std::size_t used = 0;
      v = std::stoi(*raw, &used);
      if (used != raw->size()) throw std::invalid_argument(*raw);
    } catch (const std::exception&) {
      throw ScanError("minSdkVersion '" + *raw + "' is not an integer");
    }
    if (v < 1) throw ScanError("minSdkVersion must be at least 1");
    m.min_sdk = v;
  }
  return m;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ScanError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline AppBundle load_bundle(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ScanError("app directory " + dir.string() + " does not exist");
  const fs::path manifest = dir / "AndroidManifest.xml";
  if (!fs::is_regular_file(manifest)) throw ScanError("missing " + manifest.string());
  AppBundle b;
  try {
    b.manifest = parse_manifest(read_file(manifest));
  } catch (const xml::XmlError& e) {
    throw ScanError("AndroidManifest.xml: " + std::string(e.what()));
  }
  const fs::path res = dir / "res";
  if (!fs::is_directory(res)) return b;
  std::vector<fs::path> files;
  for (const auto& sub : fs::directory_iterator(res)) {
    if (!sub.is_directory()) continue;
    for (const auto& f : fs::directory_iterator(sub.path()))
      if (f.is_regular_file() && f.path().extension() == ".xml") files.push_back(f.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    ResourceFile r;
    r.path = fs::relative(f, dir).generic_string();
    std::tie(r.res_type, r.qualifier_level) = split_qualifier(f.parent_path().filename().string());
    r.logical_name = f.stem().string();
    try {
      r.root = xml::parse(read_file(f));
    } catch (const xml::XmlError& e) {
      b.diagnostics.push_back(r.path + ": " + e.what() + " (file skipped)");
    }
    b.resources.push_back(std::move(r));
  }
  return b;
}

// ---------------------------------------------------------------------------
// Value formats

enum class ValueFormat { Styled, Reference, Bool, Int, Float, Dimension, String };

inline const char* to_string(ValueFormat f) {
  switch (f) {
    case ValueFormat::Styled: return "styled";
    case ValueFormat::Reference: return "reference";
    case ValueFormat::Bool: return "bool";
    case ValueFormat::Int: return "int";
    case ValueFormat::Float: return "float";
    case ValueFormat::Dimension: return "dimension";
    case ValueFormat::String: return "string";
  }
  return "?";
}

inline ValueFormat classify_value_format(std::string_view raw) {
  auto hex = [](std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isxdigit(c); });
  };
  // [sign] digits [. digits] ; returns the length consumed and whether it had a point
  auto number = [&](std::string_view s, bool& point) -> std::size_t {
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    std::size_t b = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    point = false;
    if (i < s.size() && s[i] == '.') {
      point = true;
      ++i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    }
    if (i == b || (point && i == b + 1)) return 0;
    return i;
  };

  if (raw.empty()) return ValueFormat::String;
  if (raw[0] == '?') return ValueFormat::Styled;
  if (raw[0] == '@') return ValueFormat::Reference;
  if (raw == "true" || raw == "false") return ValueFormat::Bool;
  if (raw[0] == '#' && hex(raw.substr(1))) return ValueFormat::Int;
  if (raw.size() > 2 && raw[0] == '0' && (raw[1] == 'x' || raw[1] == 'X') && hex(raw.substr(2)))
    return ValueFormat::Int;
  bool point = false;
  std::size_t n = number(raw, point);
  if (n > 0) {
    if (n == raw.size()) return point ? ValueFormat::Float : ValueFormat::Int;
    static const std::set<std::string_view> units = {"dp", "dip", "sp", "px", "pt", "in", "mm"};
    if (units.count(raw.substr(n))) return ValueFormat::Dimension;
  }
  return ValueFormat::String;
}

// Styled values match every styled format; references match every base one.
inline bool format_matches(ValueFormat v, DataFormat f) {
  switch (v) {
    case ValueFormat::Styled: return is_styled(f);
    case ValueFormat::Reference: return !is_styled(f);
    case ValueFormat::Bool: return f == DataFormat::Bool;
    case ValueFormat::Int: return f == DataFormat::Int;
    case ValueFormat::Float: return f == DataFormat::Float;
    case ValueFormat::Dimension: return f == DataFormat::Dimension;
    case ValueFormat::String: return f == DataFormat::String;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Matching and filters

enum class Filter { V, Lib };

inline const char* to_string(Filter f) { return f == Filter::V ? "F_v" : "F_lib"; }

struct Warning {
  DetectionRule rule;
  std::string file;
  int line = 0;
  std::string tag;
  std::string attribute;
  std::string value;
  std::set<Filter> filtered_by;

  auto sort_key() const { return std::tie(file, line, attribute, rule); }
};

inline std::vector<Warning> match_rules(const AppBundle& bundle,
                                        const std::vector<DetectionRule>& rules) {
  std::vector<Warning> out;
  for (const auto& file : bundle.resources) {
    if (!file.root) continue;
    xml::for_each_element(*file.root, [&](const xml::Element& e) {
      for (const auto& a : e.attributes) {
        if (a.ns != kAndroidNs) continue;
        const std::string name = "android:" + a.local;
        for (const auto& r : rules) {
          if (r.attribute != name || r.xml_tag != e.qname) continue;
          if (r.kind == RuleKind::FormatChange &&
              !format_matches(classify_value_format(a.value), *r.format))
            continue;
          out.push_back({r, file.path, a.line, e.qname, name, a.value, {}});
        }
      }
    });
  }
  std::sort(out.begin(), out.end(),
            [](const Warning& x, const Warning& y) { return x.sort_key() < y.sort_key(); });
  return out;
}

// A copy with qualifier K serves level l unless a sibling with a higher
// qualifier K' <= l shadows it.
inline bool usable_at(const AppBundle& bundle, const ResourceFile& f, int level) {
  if (level < std::max(f.qualifier_level, bundle.manifest.min_sdk)) return false;
  for (const auto* s : bundle.siblings(f))
    if (s->qualifier_level > f.qualifier_level && s->qualifier_level <= level) return false;
  return true;
}

// True when the warning is invalid.
inline bool filter_v(const AppBundle& bundle, const Warning& w) {
  const ResourceFile* f = bundle.find(w.file);
  if (!f) throw std::invalid_argument("warning for unknown file " + w.file);
  return !(usable_at(bundle, *f, w.rule.l1) && usable_at(bundle, *f, w.rule.l2));
}

inline const std::vector<std::string>& default_lib_prefixes() {
  static const std::vector<std::string> p = {"androidx.", "android.support.",
                                             "com.google.android.material."};
  return p;
}

inline std::vector<std::string> parse_lib_prefixes(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(b, e - b + 1));
  }
  return out;
}

// True when the library, not the platform, parses the file.
inline bool filter_lib(const AppBundle& bundle, const Warning& w,
                       const std::vector<std::string>& prefixes) {
  const ResourceFile* f = bundle.find(w.file);
  if (!f) throw std::invalid_argument("warning for unknown file " + w.file);
  if (!f->root) return false;
  bool all_lib = true;
  xml::for_each_element(*f->root, [&](const xml::Element& e) {
    bool lib = std::any_of(prefixes.begin(), prefixes.end(),
                           [&](const std::string& p) { return e.qname.rfind(p, 0) == 0; });
    all_lib = all_lib && lib;
  });
  if (all_lib) return true;
  std::size_t own = 0;
  for (const auto& a : f->root->attributes) {
    if (a.qname == "xmlns" || a.prefix == "xmlns") continue;
    if (a.ns == kAndroidNs) return false;
    ++own;
  }
  return own > 0;
}

struct ScanOptions {
  bool filter_v = true;
  bool filter_lib = true;
  std::vector<std::string> lib_prefixes = default_lib_prefixes();
};

struct ScanReport {
  std::vector<Warning> warnings;  // every match (D), sorted
  std::size_t d = 0;
  std::size_t removed_v = 0;
  std::size_t removed_lib = 0;  // removed by F_lib among those F_v kept
  std::vector<std::string> diagnostics;

  std::size_t final_count() const { return d - removed_v - removed_lib; }
  std::vector<Warning> final_warnings() const {
    std::vector<Warning> out;
    for (const auto& w : warnings)
      if (w.filtered_by.empty()) out.push_back(w);
    return out;
  }
};

inline ScanReport scan(const AppBundle& bundle, const std::vector<DetectionRule>& rules,
                       const ScanOptions& opts = {}) {
  ScanReport r;
  r.diagnostics = bundle.diagnostics;
  r.warnings = match_rules(bundle, rules);
  r.d = r.warnings.size();
  for (auto& w : r.warnings) {
    if (opts.filter_v && filter_v(bundle, w)) w.filtered_by.insert(Filter::V);
    if (opts.filter_lib && filter_lib(bundle, w, opts.lib_prefixes)) w.filtered_by.insert(Filter::Lib);
    if (w.filtered_by.count(Filter::V)) ++r.removed_v;
    else if (w.filtered_by.count(Filter::Lib)) ++r.removed_lib;
  }
  return r;
}

inline std::string to_json_line(const Warning& w) {
  nlohmann::ordered_json j;
  j["file"] = w.file;
  j["line"] = w.line;
  j["tag"] = w.tag;
  j["attribute"] = w.attribute;
  j["value"] = w.value;
  j["rule"] = rule_id(w.rule);
  auto fb = nlohmann::ordered_json::array();
  for (auto f : w.filtered_by) fb.push_back(to_string(f));
  j["filtered_by"] = fb;
  return j.dump();
}

inline std::string write_report(const ScanReport& r) {
  std::string out;
  for (const auto& w : r.warnings) out += to_json_line(w) + "\n";
  return out;
}

}  // namespace confcompat
