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

#include <confcompat/xml.hpp>

#include <catch_amalgamated.hpp>

using namespace confcompat;

namespace {

constexpr const char* kAndroid = "http://schemas.android.com/apk/res/android";

int error_line(std::string_view text) {
  try {
    xml::parse(text);
  } catch (const xml::XmlError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("namespaces and line numbers") {
  auto root = xml::parse(R"(<?xml version="1.0" encoding="utf-8"?>
<!-- header -->
<selector xmlns:android="http://schemas.android.com/apk/res/android">
    <item
        android:state_activated="true"
        android:color="?android:attr/textColorSecondary" />
    <item android:color="@android:color/transparent" plain="1"/>
</selector>
)");
  CHECK(root.qname == "selector");
  CHECK(root.ns.empty());
  CHECK(root.line == 3);
  REQUIRE(root.children.size() == 2);
  const auto& item = root.children[0];
  CHECK(item.line == 4);
  const auto* color = item.find_attribute(kAndroid, "color");
  REQUIRE(color);
  CHECK(color->line == 6);
  CHECK(color->value == "?android:attr/textColorSecondary");
  CHECK(color->prefix == "android");
  const auto* plain = root.children[1].find_attribute("", "plain");
  REQUIRE(plain);
  CHECK(plain->ns.empty());
  CHECK(root.children[1].find_attribute(kAndroid, "plain") == nullptr);
  CHECK(root.attributes.at(0).ns == "http://www.w3.org/2000/xmlns/");
}

TEST_CASE("prefixes resolve through nested scopes") {
  auto root = xml::parse(R"(<a xmlns="urn:d" xmlns:p="urn:p1">
  <b xmlns:p="urn:p2" p:x="1"><p:c/></b>
  <p:c p:y="2"/>
</a>)");
  CHECK(root.ns == "urn:d");
  const auto& b = root.children.at(0);
  CHECK(b.ns == "urn:d");
  CHECK(b.attributes.back().ns == "urn:p2");
  CHECK(b.children.at(0).ns == "urn:p2");
  CHECK(root.children.at(1).ns == "urn:p1");
  CHECK(root.children.at(1).attributes.at(0).ns == "urn:p1");
}

TEST_CASE("entities, character references and skipped content") {
  auto root = xml::parse(R"(<!DOCTYPE r [ <!ENTITY x "y"> ]>
<r v="a&amp;b&lt;&gt;&quot;&apos;&#65;&#x42;&#xe9;">
  text &amp; more <![CDATA[ <not-an-element> ]]> <?pi data?>
  <!-- <c/> -->
  <d/>
</r>)");
  CHECK(root.attributes.at(0).value == "a&b<>\"'AB\xc3\xa9");
  REQUIRE(root.children.size() == 1);
  CHECK(root.children[0].qname == "d");
  CHECK(root.children[0].line == 5);
  int count = 0;
  xml::for_each_element(root, [&](const xml::Element&) { ++count; });
  CHECK(count == 2);
}

TEST_CASE("malformed documents report the line") {
  CHECK(error_line("<a>\n<b>\n</a>") == 3);
  CHECK(error_line("<a x='1' x='2'/>") == 1);
  CHECK(error_line("<a>\n  <p:b/>\n</a>") == 2);
  CHECK(error_line("<a/>\n<b/>") == 2);
  CHECK(error_line("") == 1);
  CHECK(error_line("<a v='&bogus;'/>") == 1);
  CHECK(error_line("<a v='&#xZZ;'/>") == 1);
  CHECK(error_line("<a\n\nv=1/>") == 3);
  CHECK(error_line("<a>\n<!-- open") == 2);
  CHECK(error_line("<a>") == 1);
  CHECK(error_line("<a b='1'c='2'/>") == 1);
  CHECK(error_line("x<a/>") == 1);
}
