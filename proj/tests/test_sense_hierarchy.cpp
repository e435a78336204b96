#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "hiercon/error.hpp"
#include "hiercon/sense_hierarchy.hpp"

using namespace hiercon;
using nlohmann::json;

namespace {

const SenseHierarchy& pdtb2() { return builtin_hierarchy(HierarchyVersion::pdtb2); }
const SenseHierarchy& pdtb3() { return builtin_hierarchy(HierarchyVersion::pdtb3); }

json minimal_doc() {
  return json::parse(R"({
    "version": "pdtb3",
    "classification_labels": {"level1": ["Temporal"], "level2": ["Temporal.Asynchronous"]},
    "senses": [{"name": "Temporal", "children": [
      {"name": "Synchronous", "symmetric": true, "children": []},
      {"name": "Asynchronous", "symmetric": false, "children": [
        {"name": "Precedence"}, {"name": "Succession"}]}]}]
  })");
}

SenseHierarchy load(const json& doc) { return load_hierarchy(doc.dump(), HierarchyVersion::pdtb3); }

} // namespace

TEST_CASE("pdtb3 level-1 senses") {
  std::vector<std::string> names;
  for (const auto& r : pdtb3().roots()) names.push_back(r.name);
  CHECK(names == std::vector<std::string>{"Temporal", "Contingency", "Comparison", "Expansion"});
  CHECK(pdtb3().level1_classes() == names);
}

TEST_CASE("Temporal.Asynchronous has precedence and succession") {
  const SenseNode* n = pdtb3().find("Temporal.Asynchronous");
  REQUIRE(n != nullptr);
  CHECK_FALSE(n->symmetric);
  REQUIRE(n->children.size() == 2);
  CHECK(n->children[0].name == "Precedence");
  CHECK(n->children[1].name == "Succession");
  CHECK(pdtb3().find("Temporal.Nope") == nullptr);
}

TEST_CASE("classification allow-lists have 11 and 14 level-2 senses") {
  CHECK(pdtb2().level2_classes().size() == 11);
  CHECK(pdtb3().level2_classes().size() == 14);
  CHECK(pdtb3().level2_index("Expansion.Level-of-detail") >= 0);
  CHECK(pdtb3().level2_index("Expansion.Disjunction") == -1);
  CHECK(pdtb2().level2_index("Contingency.Pragmatic-cause") >= 0);
  CHECK(pdtb2().level2_index("Contingency.Condition") == -1);
}

TEST_CASE("every terminal resolves through one root path") {
  for (const auto* h : {&pdtb2(), &pdtb3()}) {
    std::set<std::string> seen;
    for (const auto& t : h->terminals()) {
      CHECK(seen.insert(t).second);
      const SenseLabel l = resolve_terminal(t, *h);
      CHECK(l.terminal == t);
      CHECK(h->label_index().at(t) == l);
      const SenseNode* l2 = h->find(l.level2());
      REQUIRE(l2 != nullptr);
      CHECK(l.l3.has_value() == !l2->symmetric);
    }
    CHECK(h->label_index().size() == h->terminals().size());
  }
}

TEST_CASE("resolve_terminal") {
  const SenseLabel a = resolve_terminal("Temporal.Asynchronous.Precedence", pdtb3());
  CHECK(a.l1 == "Temporal");
  CHECK(a.l2 == "Asynchronous");
  CHECK(a.l3 == std::optional<std::string>("Precedence"));
  CHECK(a.level2() == "Temporal.Asynchronous");

  const SenseLabel s = resolve_terminal("Temporal.Synchronous", pdtb3());
  CHECK(s.l2 == "Synchronous");
  CHECK_FALSE(s.l3.has_value());
  CHECK(s.terminal == "Temporal.Synchronous");

  CHECK_THROWS_AS(resolve_terminal("Temporal.Asynchronous", pdtb3()), ValidationError);
  CHECK_THROWS_AS(resolve_terminal("Temporal", pdtb3()), ValidationError);
  CHECK_THROWS_AS(resolve_terminal("Temporal.Synchrony", pdtb3()), LookupError);
  CHECK_THROWS_AS(resolve_terminal("Temporal.Synchronous.Extra", pdtb3()), LookupError);
  CHECK_NOTHROW(resolve_terminal("Temporal.Synchrony", pdtb2()));
}

TEST_CASE("are_sisters") {
  const auto& h = pdtb3();
  const auto p = resolve_terminal("Temporal.Asynchronous.Precedence", h);
  CHECK(are_sisters(p, resolve_terminal("Temporal.Asynchronous.Succession", h)));
  CHECK(are_sisters(p, resolve_terminal("Temporal.Synchronous", h)));
  CHECK_FALSE(are_sisters(p, resolve_terminal("Contingency.Cause.Reason", h)));
  const auto s = resolve_terminal("Temporal.Synchronous", h);
  CHECK_FALSE(are_sisters(s, s));
  CHECK_THROWS_AS(are_sisters(p, resolve_terminal("Temporal.Synchrony", pdtb2())), UsageError);
}

TEST_CASE("builtin documents reload") {
  for (auto v : {HierarchyVersion::pdtb2, HierarchyVersion::pdtb3}) {
    const SenseHierarchy h = load_hierarchy(builtin_hierarchy_document(v), v);
    CHECK(h.terminals() == builtin_hierarchy(v).terminals());
  }
  CHECK(hierarchy_from_arg("pdtb2").version() == HierarchyVersion::pdtb2);
}

TEST_CASE("hierarchy_from_arg reads a file") {
  const auto path = std::filesystem::temp_directory_path() / "hiercon_test_hierarchy.json";
  {
    std::ofstream out(path);
    out << minimal_doc().dump();
  }
  const SenseHierarchy h = hierarchy_from_arg(path.string());
  CHECK(h.terminals().size() == 3);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(hierarchy_from_arg(path.string()), LookupError);
}

TEST_CASE("structural violations are rejected") {
  CHECK(load(minimal_doc()).terminals() ==
        std::vector<std::string>{"Temporal.Synchronous", "Temporal.Asynchronous.Precedence",
                                 "Temporal.Asynchronous.Succession"});

  auto doc = minimal_doc();
  doc["senses"][0]["children"][1]["children"] = json::array();
  CHECK_THROWS_AS(load(doc), ValidationError);

  doc = minimal_doc();
  doc["senses"][0]["children"][0]["children"] = json::array({{{"name", "X"}}});
  CHECK_THROWS_AS(load(doc), ValidationError);

  doc = minimal_doc();
  doc["senses"][0]["children"][0].erase("symmetric");
  CHECK_THROWS_AS(load(doc), ValidationError);

  doc = minimal_doc();
  doc["senses"][0]["children"][1]["children"][1]["name"] = "Precedence";
  CHECK_THROWS_AS(load(doc), ValidationError);

  doc = minimal_doc();
  doc["senses"][0]["children"][1]["children"][0]["children"] = json::array({{{"name", "Deep"}}});
  CHECK_THROWS_AS(load(doc), ValidationError);

  doc = minimal_doc();
  doc["classification_labels"]["level2"] = json::array({"Temporal.Asynchronous.Precedence"});
  CHECK_THROWS_AS(load(doc), ValidationError);

  CHECK_THROWS_AS(load_hierarchy(minimal_doc().dump(), HierarchyVersion::pdtb2), ValidationError);
  CHECK_THROWS_AS(load_hierarchy("{", HierarchyVersion::pdtb3), ValidationError);
}

TEST_CASE("version names") {
  CHECK(parse_version("pdtb2") == HierarchyVersion::pdtb2);
  CHECK(to_string(HierarchyVersion::pdtb3) == "pdtb3");
  CHECK_THROWS_AS(parse_version("pdtb4"), ValidationError);
}
