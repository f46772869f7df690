#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lexdiff/errors.hpp"
#include "lexdiff/interface.hpp"
#include "support/oracle.hpp"

using namespace lexdiff;
using oracle::make_tree;

namespace {

Matching matched_twins(const Formalization& a, const Formalization& b) {
  std::vector<EquivalenceClass> classes;
  for (const auto& [id, n] : a.nodes) classes.push_back({"e_" + id, std::nullopt, {{a.tree_id, id}, {b.tree_id, id}}});
  return Matching::build("p", classes, std::vector<Formalization>{a, b});
}

BoolExpr var(const std::string& v) { return BoolExpr::variable(v); }

}  // namespace

TEST_CASE("identical trees cut at the leaves with full coverage") {
  auto t = make_tree("A", "r", {{"r", Operator::And, {"x", "o"}}, {"o", Operator::Or, {"y", "z"}},
                                {"x", {}, {}}, {"y", {}, {}}, {"z", {}, {}}});
  auto u = t;
  u.tree_id = "B";
  auto m = matched_twins(t, u);
  auto iface = compute_interface(m, "A", "B");
  CHECK(iface.cut_ecs == std::vector<std::string>{"e_x", "e_y", "e_z"});
  CHECK(iface.private_vars.empty());
  CHECK(iface.cov_a == 1.0);
  CHECK(iface.cov_b == 1.0);
  CHECK(iface.cov_pair == 1.0);
  CHECK(placement(t, iface, "r") == Placement::AboveCut);
  CHECK(placement(t, iface, "y") == Placement::AtCut);
}

TEST_CASE("unmatched subtrees become private variables") {
  // A = AND(x, y), B = AND(x, OR(y1, y2)); only roots and x are matched.
  std::vector<Formalization> trees{
      make_tree("A", "r", {{"r", Operator::And, {"x", "y"}}, {"x", {}, {}}, {"y", {}, {}}}),
      make_tree("B", "r", {{"r", Operator::And, {"x", "o"}}, {"o", Operator::Or, {"y1", "y2"}},
                           {"x", {}, {}}, {"y1", {}, {}}, {"y2", {}, {}}})};
  std::vector<EquivalenceClass> classes{{"root", std::nullopt, {{"A", "r"}, {"B", "r"}}},
                                        {"x", std::nullopt, {{"A", "x"}, {"B", "x"}}},
                                        {"ya", std::nullopt, {{"A", "y"}}},
                                        {"ob", std::nullopt, {{"B", "o"}}},
                                        {"y1", std::nullopt, {{"B", "y1"}}},
                                        {"y2", std::nullopt, {{"B", "y2"}}}};
  auto m = Matching::build("p", classes, trees);
  auto iface = compute_interface(m, "A", "B");
  CHECK(iface.cut_ecs == std::vector<std::string>{"x"});
  REQUIRE(iface.private_vars.size() == 2);
  CHECK(iface.private_vars[0] == PrivateVar{"~A/y", "A", "y"});
  CHECK(iface.private_vars[1] == PrivateVar{"~B/o", "B", "o"});
  CHECK(compile(trees[1], iface).to_string() == "AND(x, ~B/o)");
  CHECK(placement(trees[1], iface, "o") == Placement::PrivateRoot);
  CHECK(placement(trees[1], iface, "y1") == Placement::Abstracted);
  CHECK_FALSE(compile_at(trees[1], iface, "y1").has_value());
  CHECK(iface.input_variables() == std::vector<std::string>{"x", "~A/y", "~B/o"});
  CHECK(iface.cov_a == doctest::Approx(2.0 / 3.0));
  CHECK(iface.cov_b == doctest::Approx(2.0 / 5.0));
}

TEST_CASE("frontier repair keeps the shallower EC") {
  // A treats c as a leaf, B refines it into AND(d, e) with d matched to A's d.
  std::vector<Formalization> trees{
      make_tree("A", "r", {{"r", Operator::Or, {"c", "d"}}, {"c", {}, {}}, {"d", {}, {}}}),
      make_tree("B", "r", {{"r", Operator::Or, {"c"}}, {"c", Operator::And, {"d", "e"}}, {"d", {}, {}}, {"e", {}, {}}})};
  std::vector<EquivalenceClass> classes{{"R", std::nullopt, {{"A", "r"}, {"B", "r"}}},
                                        {"C", std::nullopt, {{"A", "c"}, {"B", "c"}}},
                                        {"D", std::nullopt, {{"A", "d"}, {"B", "d"}}},
                                        {"E", std::nullopt, {{"B", "e"}}}};
  auto m = Matching::build("p", classes, trees);
  auto iface = compute_interface(m, "A", "B");
  // Frontiers: A = {C, D}, B = {D}; D lies under C in B, so the cut is {C}.
  CHECK(iface.cut_ecs == std::vector<std::string>{"C"});
  REQUIRE(iface.private_vars.size() == 1);
  CHECK(iface.private_vars[0].id == "~A/d");
}

TEST_CASE("no shared EC gives an empty interface and zero coverage") {
  std::vector<Formalization> trees{make_tree("A", "a", {{"a", {}, {}}}), make_tree("B", "b", {{"b", {}, {}}})};
  auto m = Matching::build("p", {{"a", std::nullopt, {{"A", "a"}}}, {"b", std::nullopt, {{"B", "b"}}}}, trees);
  auto iface = compute_interface(m, "A", "B");
  CHECK(iface.no_shared);
  CHECK(iface.cut_ecs.empty());
  CHECK(iface.cov_pair == 0.0);
  CHECK(compile(trees[0], iface) == var("~A/a"));
  CHECK_THROWS_AS(compute_interface(m, "A", "Z"), UnknownTree);
}

TEST_CASE("compile examples") {
  SUBCASE("single leaf") {
    auto a = make_tree("A", "x", {{"x", {}, {}}});
    auto b = make_tree("B", "x", {{"x", {}, {}}});
    auto iface = compute_interface(matched_twins(a, b), "A", "B");
    CHECK(compile(a, iface) == var("e_x"));
  }
  SUBCASE("carve-out fork differs only in the operator") {
    auto a = make_tree("A", "f", {{"f", Operator::Nand, {"l", "e"}}, {"l", {}, {}}, {"e", {}, {}}});
    auto b = make_tree("B", "f", {{"f", Operator::Nor, {"l", "e"}}, {"l", {}, {}}, {"e", {}, {}}});
    auto iface = compute_interface(matched_twins(a, b), "A", "B");
    auto fa = compile(a, iface);
    auto fb = compile(b, iface);
    CHECK(fa == BoolExpr::apply(Operator::Nand, {var("e_l"), var("e_e")}));
    CHECK(fb == BoolExpr::apply(Operator::Nor, {var("e_l"), var("e_e")}));
  }
}

TEST_CASE("eval truth tables and unbound variables") {
  auto nand = BoolExpr::apply(Operator::Nand, {var("a"), var("b")});
  auto nor = BoolExpr::apply(Operator::Nor, {var("a"), var("b")});
  CHECK(eval(nand, {{"a", true}, {"b", false}}));
  CHECK_FALSE(eval(nor, {{"a", true}, {"b", false}}));
  CHECK_FALSE(eval(BoolExpr::apply(Operator::Nand, {var("a")}), {{"a", true}}));
  CHECK(eval(BoolExpr::apply(Operator::Or, {var("a")}), {{"a", true}}));
  CHECK_THROWS_AS(eval(nand, {{"a", true}}), UnboundVariable);
}

TEST_CASE("eval agrees with a recursive reference on random expressions") {
  std::mt19937_64 rng(5);
  std::function<BoolExpr(int&)> grow = [&](int& budget) -> BoolExpr {
    if (budget <= 1 || rng() % 3 == 0) {
      --budget;
      return var("v" + std::to_string(rng() % 6));
    }
    --budget;
    std::vector<BoolExpr> kids;
    int k = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < k && budget > 0; ++i) kids.push_back(grow(budget));
    if (kids.empty()) kids.push_back(var("v0"));
    return BoolExpr::apply(static_cast<Operator>(rng() % 4), kids);
  };
  std::function<bool(const BoolExpr&, const Assignment&)> ref = [&](const BoolExpr& e, const Assignment& s) {
    if (e.is_variable()) return s.at(e.var());
    std::vector<bool> xs;
    for (const auto& o : e.operands()) xs.push_back(ref(o, s));
    return oracle::apply_op(e.op(), xs);
  };
  for (int i = 0; i < 300; ++i) {
    int budget = 20;
    auto e = grow(budget);
    Assignment s;
    for (int v = 0; v < 6; ++v) s["v" + std::to_string(v)] = rng() & 1;
    CHECK(eval(e, s) == ref(e, s));
  }
}

TEST_CASE("interface agrees with the reference on random pairs") {
  oracle::PairGenerator gen(99);
  for (int i = 0; i < 400; ++i) {
    auto p = gen.next(8);
    auto m = Matching::build("rand", p.classes, p.trees);
    auto iface = compute_interface(m, "ta", "tb");
    auto ref = oracle::ref_interface(m, "ta", "tb");
    CHECK(std::set<std::string>(iface.cut_ecs.begin(), iface.cut_ecs.end()) == ref.cut);
    auto inputs = iface.input_variables();
    CHECK(std::set<std::string>(inputs.begin(), inputs.end()) == ref.inputs("ta", "tb"));
    CHECK(iface.cov_a == doctest::Approx(ref.cov_a).epsilon(1e-12));
    CHECK(iface.cov_b == doctest::Approx(ref.cov_b).epsilon(1e-12));
    CHECK(iface.cov_pair == doctest::Approx(ref.cov_pair).epsilon(1e-12));
    CHECK((iface.cov_pair == 0.0) == iface.cut_ecs.empty());
    // Antichain in both trees.
    for (const auto& d : iface.cut_ecs) {
      for (const auto& e : iface.cut_ecs) {
        for (const auto* t : {"ta", "tb"}) {
          CHECK_FALSE(oracle::is_strict_descendant(m.tree(t), *m.node_in(d, t), *m.node_in(e, t)));
        }
      }
    }
    // No input sits below another in the same tree, so no PI can fix a
    // variable together with one of its own descendants.
    for (const auto* t : {"ta", "tb"}) {
      std::vector<std::string> nodes;
      for (const auto& [node, ec] : iface.cut_nodes[t]) nodes.push_back(node);
      for (const auto& pv : iface.private_vars) {
        if (pv.tree_id == t) nodes.push_back(pv.node_id);
      }
      for (const auto& x : nodes) {
        for (const auto& y : nodes) CHECK_FALSE(oracle::is_strict_descendant(m.tree(t), x, y));
      }
    }
    // Compilation preserves the tree semantics over the inputs.
    auto fa = compile(m.tree("ta"), iface);
    std::mt19937_64 rng(i);
    for (int k = 0; k < 8; ++k) {
      oracle::Env env;
      for (const auto& v : inputs) env[v] = rng() & 1;
      CHECK(eval(fa, env) == *oracle::eval_node(m, ref, m.tree("ta"), env, m.tree("ta").root));
    }
  }
}

TEST_CASE("leaf cut compilation equals direct evaluation of the tree") {
  oracle::PairGenerator gen(17);
  for (int i = 0; i < 100; ++i) {
    auto a = gen.next(8).trees[0];
    auto b = a;
    b.tree_id = "tb";
    auto m = matched_twins(a, b);
    auto iface = compute_interface(m, "ta", "tb");
    CHECK(iface.private_vars.empty());
    auto f = compile(a, iface);
    std::mt19937_64 rng(i);
    Assignment leaves;
    for (const auto& l : lexdiff::leaves(a)) leaves["e_" + l] = rng() & 1;
    std::function<bool(const std::string&)> direct = [&](const std::string& id) {
      const auto& n = a.node(id);
      if (n.is_leaf()) return leaves.at("e_" + id);
      std::vector<bool> xs;
      for (const auto& c : n.children) xs.push_back(direct(c));
      return oracle::apply_op(*n.op, xs);
    };
    CHECK(eval(f, leaves) == direct(a.root));
  }
}

TEST_CASE("interfaces serialize as one row per pair") {
  auto t = make_tree("A", "r", {{"r", Operator::And, {"x"}}, {"x", {}, {}}});
  auto u = t;
  u.tree_id = "B";
  auto iface = compute_interface(matched_twins(t, u), "A", "B");
  std::vector<Interface> rows{iface};
  auto text = serialize_interfaces(rows);
  CHECK(text.find("\"cut_ecs\"") != std::string::npos);
  CHECK(text.find("\"cov_pair\"") != std::string::npos);
}
