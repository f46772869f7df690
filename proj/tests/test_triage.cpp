#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <nlohmann/json.hpp>

#include "lexdiff/edgecase.hpp"
#include "lexdiff/triage.hpp"
#include "support/oracle.hpp"

using namespace lexdiff;
using oracle::make_tree;

namespace {

std::vector<EquivalenceClass> twin_classes(std::initializer_list<std::pair<const char*, const char*>> ecs,
                                           const std::vector<std::string>& trees) {
  std::vector<EquivalenceClass> out;
  for (const auto& [ec, node] : ecs) {
    EquivalenceClass c{ec, std::nullopt, {}};
    for (const auto& t : trees) c.members.push_back({t, node});
    out.push_back(c);
  }
  return out;
}

// Fork under a unary AND root: R = AND(F), F = op(a, b).
Formalization fork(const std::string& id, Operator op) {
  return make_tree(id, "r", {{"r", Operator::And, {"f"}}, {"f", op, {"a", "b"}}, {"a", {}, {}}, {"b", {}, {}}});
}

struct Fixture {
  Matching m;
  std::vector<PairAnalysis> pairs;
};

Fixture forks(const std::vector<std::pair<std::string, Operator>>& specs) {
  std::vector<Formalization> trees;
  std::vector<std::string> ids;
  for (const auto& [id, op] : specs) {
    trees.push_back(fork(id, op));
    ids.push_back(id);
  }
  Fixture fx{Matching::build("p", twin_classes({{"R", "r"}, {"F", "f"}, {"A", "a"}, {"B", "b"}}, ids), trees), {}};
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      auto iface = compute_interface(fx.m, ids[i], ids[j]);
      auto cover = enumerate_cover(compile(fx.m.tree(ids[i]), iface), compile(fx.m.tree(ids[j]), iface));
      fx.pairs.push_back({iface, cover});
    }
  }
  return fx;
}

}  // namespace

TEST_CASE("carve-out fork: one root cause, one class") {
  auto fx = forks({{"t1", Operator::Nand}, {"t2", Operator::Nor}});
  const auto& pa = fx.pairs.at(0);
  REQUIRE(pa.cover.pis.size() == 2);
  RootCauseAnalyzer analyzer(fx.m, pa.iface);
  CHECK(analyzer.candidates() == std::vector<std::string>{"A", "B", "F", "R"});
  for (const auto& pi : pa.cover.pis) {
    auto causes = analyzer.root_causes(pi);
    REQUIRE(causes.size() == 1);
    CHECK(causes[0].ec_id == "F");
    CHECK(causes[0].true_tree == std::optional<std::string>("t1"));
    CHECK(analyzer.concluding_tree(pi) == std::optional<std::string>("t1"));
  }
  auto s0 = analyzer.signature(pa.cover.pis[0], analyzer.root_causes(pa.cover.pis[0]));
  auto s1 = analyzer.signature(pa.cover.pis[1], analyzer.root_causes(pa.cover.pis[1]));
  CHECK(s0 == s1);
  CHECK(s0.digest() == s1.digest());
  CHECK_FALSE(s0.mixed);
  REQUIRE(s0.entries.size() == 1);
  CHECK(s0.entries[0].true_side == SideShape{Operator::And, true, {"A", "B"}});
  CHECK(s0.entries[0].false_side == SideShape{Operator::Or, true, {"A", "B"}});

  // Free functions agree with the analyzer.
  CHECK(root_causes(pa.cover.pis[0], pa.iface, fx.m) == analyzer.root_causes(pa.cover.pis[0]));

  auto reps = select_representatives(fx.m, fx.pairs);
  REQUIRE(reps.size() == 1);
  CHECK(reps[0].class_size == 2);
  // Ties on size break on the fixed assignment: a=false sorts first.
  CHECK(reps[0].pi.fixed == Assignment{{"A", false}, {"B", true}});
  CHECK(reps[0].pi.pair == PairId{"p", "t1", "t2"});
  CHECK(reps[0].variable_labels.at("A") == "label a");
}

TEST_CASE("signature is independent of tree order") {
  auto ab = forks({{"t1", Operator::Nand}, {"t2", Operator::Nor}});
  auto ba = forks({{"t1", Operator::Nor}, {"t2", Operator::Nand}});
  auto sig = [](Fixture& fx) {
    const auto& pa = fx.pairs.at(0);
    RootCauseAnalyzer analyzer(fx.m, pa.iface);
    return analyzer.signature(pa.cover.pis[0], analyzer.root_causes(pa.cover.pis[0]));
  };
  CHECK(sig(ab) == sig(ba));
}

TEST_CASE("representatives: classes, ordering and cap") {
  auto fx = forks({{"t1", Operator::Nand}, {"t2", Operator::Nor}, {"t3", Operator::And}});
  auto all = select_representatives(fx.m, fx.pairs);
  CHECK(all.size() == 4);  // NOR vs AND splits by which side is true
  for (std::size_t i = 1; i < all.size(); ++i) {
    CHECK(all[i - 1].pi.fixed.size() <= all[i].pi.fixed.size());
  }
  std::set<std::string> digests;
  for (const auto& r : all) digests.insert(r.signature.digest());
  CHECK(digests.size() == all.size());

  TriageOptions capped;
  capped.cap = 2;
  auto two = select_representatives(fx.m, fx.pairs, capped);
  REQUIRE(two.size() == 2);
  CHECK(two[0].pi == all[0].pi);
  CHECK(two[1].pi == all[1].pi);

  TriageOptions strict;
  strict.coverage_threshold = 1.01;
  CHECK(select_representatives(fx.m, fx.pairs, strict).empty());

  auto text = serialize_representatives(fx.m, all);
  auto doc = nlohmann::json::parse(text);
  REQUIRE(doc.is_array());
  CHECK(doc.size() == 4);
}

TEST_CASE("differing root operators contribute nothing") {
  std::vector<Formalization> trees{
      make_tree("t1", "r", {{"r", Operator::And, {"x", "y"}}, {"x", {}, {}}, {"y", {}, {}}}),
      make_tree("t2", "r", {{"r", Operator::Or, {"x", "y"}}, {"x", {}, {}}, {"y", {}, {}}})};
  auto m = Matching::build("p", twin_classes({{"R", "r"}, {"X", "x"}, {"Y", "y"}}, {"t1", "t2"}), trees);
  auto iface = compute_interface(m, "t1", "t2");
  auto cover = enumerate_cover(compile(m.tree("t1"), iface), compile(m.tree("t2"), iface));
  CHECK(cover.pis.size() == 2);
  std::vector<PairAnalysis> pairs{{iface, cover}};
  CHECK(select_representatives(m, pairs).empty());
}

TEST_CASE("tautological disagreement has a mixed signature") {
  std::vector<Formalization> trees{make_tree("t1", "r", {{"r", Operator::And, {"x"}}, {"x", {}, {}}}),
                                   make_tree("t2", "r", {{"r", Operator::Nand, {"x"}}, {"x", {}, {}}})};
  auto m = Matching::build("p", twin_classes({{"R", "r"}, {"X", "x"}}, {"t1", "t2"}), trees);
  auto iface = compute_interface(m, "t1", "t2");
  auto cover = enumerate_cover(compile(m.tree("t1"), iface), compile(m.tree("t2"), iface));
  REQUIRE(cover.pis.size() == 1);
  const auto& pi = cover.pis[0];
  CHECK(pi.fixed.empty());
  RootCauseAnalyzer analyzer(m, iface);
  auto causes = analyzer.root_causes(pi);
  REQUIRE(causes.size() == 1);
  CHECK(causes[0].ec_id == "R");
  CHECK_FALSE(causes[0].true_tree.has_value());
  CHECK_FALSE(analyzer.concluding_tree(pi).has_value());
  auto sig = analyzer.signature(pi, causes);
  CHECK(sig.mixed);
  REQUIRE(sig.entries.size() == 1);
  CHECK(sig.entries[0].true_side <= sig.entries[0].false_side);
}

TEST_CASE("child minimality is not descendant minimality") {
  // E is forced apart while its child C is not, and D below C is forced
  // apart as well: both are root causes, only D shapes the signature.
  std::vector<Formalization> trees{
      make_tree("A", "e",
                {{"e", Operator::Or, {"c"}}, {"c", Operator::Or, {"d", "p"}}, {"d", Operator::And, {"y"}},
                 {"p", {}, {}}, {"y", {}, {}}}),
      make_tree("B", "e",
                {{"e", Operator::Nor, {"c"}}, {"c", Operator::Or, {"d", "q"}}, {"d", Operator::Nand, {"y"}},
                 {"q", {}, {}}, {"y", {}, {}}})};
  auto classes = twin_classes({{"E", "e"}, {"C", "c"}, {"D", "d"}, {"Y", "y"}}, {"A", "B"});
  classes.push_back({"P", std::nullopt, {{"A", "p"}}});
  classes.push_back({"Q", std::nullopt, {{"B", "q"}}});
  auto m = Matching::build("p", classes, trees);
  auto iface = compute_interface(m, "A", "B");
  CHECK(iface.cut_ecs == std::vector<std::string>{"Y"});
  // Prime, though the irredundant cover picks {Y=F, p} and {Y=T, q}.
  const PrimeImplicant pi{{{"~A/p", true}, {"~B/q", true}}, {"p", "A", "B"}};
  auto ref = oracle::ref_interface(m, "A", "B");
  auto tt = oracle::truth_table(m, ref, "A", "B");
  auto xs = tt.xor_set();
  for (auto row : oracle::cube(tt, pi.fixed)) CHECK(xs.count(row));

  RootCauseAnalyzer analyzer(m, iface);
  CHECK(analyzer.forced_apart(pi, "E"));
  CHECK_FALSE(analyzer.forced_apart(pi, "C"));
  CHECK(analyzer.forced_apart(pi, "D"));
  auto causes = analyzer.root_causes(pi);
  REQUIRE(causes.size() == 2);
  CHECK(causes[0].ec_id == "D");
  CHECK(causes[1].ec_id == "E");
  CHECK(causes[1].true_tree == std::optional<std::string>("A"));

  auto sig = analyzer.signature(pi, causes);
  REQUIRE(sig.entries.size() == 1);
  CHECK(sig.entries[0].ec_id == "D");
  CHECK(sig == signature_of(pi, causes, iface, m));
}

TEST_CASE("root causes match brute force on random pairs") {
  oracle::PairGenerator gen(4242);
  int checked = 0;
  while (checked < 60) {
    auto p = gen.next(6);
    auto m = Matching::build("rand", p.classes, p.trees);
    auto iface = compute_interface(m, "ta", "tb");
    if (iface.input_variables().size() > 9) continue;
    ++checked;
    auto ref = oracle::ref_interface(m, "ta", "tb");
    auto tt = oracle::truth_table(m, ref, "ta", "tb");
    auto cover = enumerate_cover(compile(m.tree("ta"), iface), compile(m.tree("tb"), iface));
    RootCauseAnalyzer analyzer(m, iface);
    for (const auto& pi : cover.pis) {
      auto got = analyzer.root_causes(pi);
      auto want = oracle::ref_root_causes(m, ref, tt, "ta", "tb", pi.fixed);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].ec_id == want[i].ec_id);
        CHECK(got[i].true_tree == want[i].true_tree);
      }
      auto sig = analyzer.signature(pi, got);
      CHECK(sig.entries.size() <= got.size());
      CHECK(sig.entries.empty() == got.empty());
    }
  }
}
