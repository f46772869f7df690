#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "lexdiff/errors.hpp"
#include "lexdiff/formal_model.hpp"
#include "support/oracle.hpp"

using namespace lexdiff;

namespace {

std::vector<ViolationRule> rules(const Formalization& f) {
  std::vector<ViolationRule> out;
  for (const auto& v : validate(f)) out.push_back(v.rule);
  return out;
}

std::string violations_of(std::string_view text) {
  try {
    parse_formalization(text);
  } catch (const StructureError& e) {
    return e.what();
  }
  return "";
}

const char* kAndTree = R"({"tree_id": "m1", "provision_id": "p", "root": "r",
  "nodes": {"r": {"label": "lawful", "operator": "AND", "children": ["x", "y"]},
            "x": {"label": "consent", "operator": null, "children": []},
            "y": {"label": "purpose", "operator": null, "children": []}}})";

}  // namespace

TEST_CASE("operators parse exactly the four tokens") {
  CHECK(parse_operator("AND") == Operator::And);
  CHECK(parse_operator("NOR") == Operator::Nor);
  CHECK_THROWS_AS(parse_operator("XOR"), SchemaError);
  CHECK_THROWS_AS(parse_operator("and"), SchemaError);
  CHECK_THROWS_AS(parse_operator("IMPLIES"), SchemaError);
  CHECK(base_operator(Operator::Nand) == Operator::And);
  CHECK(base_operator(Operator::Nor) == Operator::Or);
  CHECK(is_negated(Operator::Nand));
  CHECK_FALSE(is_negated(Operator::Or));
}

TEST_CASE("single leaf is a valid tree") {
  auto f = parse_formalization(R"({"tree_id": "m", "provision_id": "p", "root": "a",
    "nodes": {"a": {"label": "processing is lawful", "operator": null, "children": []}}})");
  CHECK(f.nodes.size() == 1);
  CHECK(f.root == "a");
  CHECK(leaves(f) == std::set<std::string>{"a"});
}

TEST_CASE("root AND over two leaves") {
  auto f = parse_formalization(kAndTree);
  CHECK(f.nodes.size() == 3);
  CHECK(f.node("r").op == Operator::And);
  CHECK(leaves(f) == std::set<std::string>{"x", "y"});
  CHECK(internal_nodes(f) == std::set<std::string>{"r"});
}

TEST_CASE("self-referencing node is a cycle") {
  auto msg = violations_of(R"({"tree_id": "m", "provision_id": "p", "root": "r",
    "nodes": {"r": {"label": "r", "operator": "AND", "children": ["a"]},
              "a": {"label": "a", "operator": "OR", "children": ["a"]}}})");
  CHECK(msg.find("Cycle(a)") != std::string::npos);
}

TEST_CASE("validate names rule and node") {
  using oracle::make_tree;
  SUBCASE("valid") {
    CHECK(validate(make_tree("t", "r", {{"r", Operator::Or, {"a", "b"}}, {"a", {}, {}}, {"b", {}, {}}})).empty());
  }
  SUBCASE("internal node without operator") {
    auto f = make_tree("t", "r", {{"r", std::nullopt, {"a"}}, {"a", {}, {}}});
    auto v = validate(f);
    REQUIRE(v.size() == 1);
    CHECK(v[0].to_string() == "MissingOperator(r)");
  }
  SUBCASE("leaf with operator") {
    auto f = make_tree("t", "r", {{"r", Operator::And, {"a"}}, {"a", Operator::Or, {}}});
    CHECK(rules(f) == std::vector{ViolationRule::LeafWithOperator});
  }
  SUBCASE("unreachable node") {
    auto f = make_tree("t", "r", {{"r", Operator::And, {"a"}}, {"a", {}, {}}, {"z", {}, {}}});
    auto v = validate(f);
    REQUIRE(v.size() == 1);
    CHECK(v[0].to_string() == "Unreachable(z)");
  }
  SUBCASE("unknown child, shared child, root as child") {
    auto f = make_tree("t", "r", {{"r", Operator::And, {"a", "b", "ghost"}}, {"a", Operator::Or, {"b"}}, {"b", {}, {}}});
    auto r = rules(f);
    CHECK(std::count(r.begin(), r.end(), ViolationRule::UnknownChild) == 1);
    CHECK(std::count(r.begin(), r.end(), ViolationRule::MultipleParents) == 1);
    auto g = make_tree("t", "r", {{"r", Operator::And, {"a"}}, {"a", Operator::And, {"r"}}});
    CHECK_FALSE(validate(g).empty());
  }
  SUBCASE("empty label") {
    auto f = make_tree("t", "r", {{"r", {}, {}}});
    f.nodes["r"].label = "";
    CHECK(rules(f) == std::vector{ViolationRule::EmptyLabel});
  }
}

TEST_CASE("schema errors") {
  CHECK_THROWS_AS(parse_formalization("not json"), SchemaError);
  CHECK_THROWS_AS(parse_formalization("[]"), SchemaError);
  CHECK_THROWS_AS(parse_formalization(R"({"provision_id": "p", "root": "a", "nodes": {}})"), SchemaError);
  CHECK_THROWS_AS(parse_formalization(R"({"tree_id": "m", "provision_id": "p", "root": "a",
    "nodes": {"a": {"label": "a", "operator": "XOR", "children": []}}})"),
                  SchemaError);
  CHECK_THROWS_AS(parse_formalization(R"({"tree_id": "m", "tree_id": "n", "provision_id": "p", "root": "a",
    "nodes": {"a": {"label": "a"}}})"),
                  SchemaError);
}

TEST_CASE("duplicate node id is a structure error") {
  auto msg = violations_of(R"({"tree_id": "m", "provision_id": "p", "root": "a",
    "nodes": {"a": {"label": "a"}, "a": {"label": "again"}}})");
  CHECK(msg.find("DuplicateId(a)") != std::string::npos);
}

TEST_CASE("round trip and leaf/internal partition on random trees") {
  oracle::PairGenerator gen(11);
  for (int i = 0; i < 200; ++i) {
    auto pair = gen.next(9);
    for (const auto& f : pair.trees) {
      CHECK(validate(f).empty());
      auto back = parse_formalization(serialize(f));
      CHECK(back == f);
      std::set<std::string> all;
      for (const auto& [id, n] : f.nodes) all.insert(id);
      std::set<std::string> rest;
      auto internal = internal_nodes(f);
      std::set_difference(all.begin(), all.end(), internal.begin(), internal.end(), std::inserter(rest, rest.end()));
      CHECK(leaves(f) == rest);
      CHECK(leaves(f).size() + internal.size() == f.nodes.size());
    }
  }
}

TEST_CASE("validate is empty iff the serialized form parses") {
  using oracle::make_tree;
  std::vector<Formalization> cases{
      make_tree("t", "r", {{"r", Operator::And, {"a"}}, {"a", {}, {}}}),
      make_tree("t", "r", {{"r", std::nullopt, {"a"}}, {"a", {}, {}}}),
      make_tree("t", "r", {{"r", Operator::And, {"a"}}, {"a", {}, {}}, {"b", {}, {}}}),
      make_tree("t", "q", {{"r", Operator::And, {"a"}}, {"a", {}, {}}}),
  };
  for (const auto& f : cases) {
    bool parses = true;
    try {
      parse_formalization(serialize(f));
    } catch (const Error&) {
      parses = false;
    }
    CHECK(parses == validate(f).empty());
  }
}
