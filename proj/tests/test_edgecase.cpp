#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lexdiff/edgecase.hpp"
#include "lexdiff/errors.hpp"
#include "lexdiff/interface.hpp"
#include "support/oracle.hpp"

using namespace lexdiff;

namespace {

BoolExpr var(const std::string& v) { return BoolExpr::variable(v); }
BoolExpr op(Operator o, std::vector<BoolExpr> xs) { return BoolExpr::apply(o, std::move(xs)); }

std::set<Assignment> fixed_set(const EdgeCaseCover& c) {
  std::set<Assignment> out;
  for (const auto& pi : c.pis) out.insert(pi.fixed);
  return out;
}

}  // namespace

TEST_CASE("equivalence examples") {
  auto conj = op(Operator::And, {var("x"), var("y")});
  CHECK(equivalent(conj, conj));
  CHECK_FALSE(equivalent(conj, op(Operator::Or, {var("x"), var("y")})));
  auto de_morgan = op(Operator::Or, {op(Operator::Nand, {var("a"), var("a")}), op(Operator::Nand, {var("b"), var("b")})});
  CHECK(equivalent(op(Operator::Nand, {var("a"), var("b")}), de_morgan));
}

TEST_CASE("AND versus OR cover") {
  auto fa = op(Operator::And, {var("x"), var("y")});
  auto fb = op(Operator::Or, {var("x"), var("y")});
  auto cover = enumerate_cover(fa, fb);
  CHECK(cover.complete);
  CHECK_FALSE(cover.cap_hit);
  CHECK(fixed_set(cover) == std::set<Assignment>{{{"x", true}, {"y", false}}, {{"x", false}, {"y", true}}});
  CHECK(cover.variables == std::vector<std::string>{"x", "y"});
  // Same input, same order.
  auto again = enumerate_cover(fa, fb);
  CHECK(again.pis == cover.pis);
}

TEST_CASE("NAND versus NOR carve-out fork") {
  auto cover = enumerate_cover(op(Operator::Nand, {var("a"), var("b")}), op(Operator::Nor, {var("a"), var("b")}));
  CHECK(fixed_set(cover) == std::set<Assignment>{{{"a", true}, {"b", false}}, {{"a", false}, {"b", true}}});
}

TEST_CASE("equal functions give an empty complete cover") {
  auto f = op(Operator::Or, {var("p"), var("q")});
  auto cover = enumerate_cover(f, f);
  CHECK(cover.pis.empty());
  CHECK(cover.complete);
  CHECK(cover.iterations == 0);
}

TEST_CASE("tautological disagreement yields the empty implicant") {
  auto cover = enumerate_cover(var("x"), op(Operator::Nand, {var("x")}));
  REQUIRE(cover.pis.size() == 1);
  CHECK(cover.pis[0].fixed.empty());
}

TEST_CASE("cap stops the search") {
  auto fa = op(Operator::And, {var("x"), var("y")});
  auto fb = op(Operator::Or, {var("x"), var("y")});
  auto capped = enumerate_cover(fa, fb, 1);
  CHECK(capped.pis.size() == 1);
  CHECK(capped.cap_hit);
  CHECK_FALSE(capped.complete);
  auto exact = enumerate_cover(fa, fb, 2);
  CHECK(exact.pis.size() == 2);
  CHECK(exact.complete);
  CHECK_FALSE(exact.cap_hit);
}

TEST_CASE("covers") {
  PrimeImplicant pi{{{"x", true}}, {}};
  CHECK(covers(pi, {{"x", true}, {"y", false}}));
  CHECK_FALSE(covers(pi, {{"x", false}, {"y", true}}));
}

TEST_CASE("cover JSON round trip") {
  auto cover = enumerate_cover(op(Operator::And, {var("x"), var("y"), var("z")}),
                               op(Operator::Or, {var("x"), var("y")}), kDefaultPiCap, PairId{"prov", "m1", "m2"});
  auto text = serialize_cover(cover);
  auto back = parse_cover(text);
  CHECK(back.pair == cover.pair);
  CHECK(back.pis == cover.pis);
  CHECK(back.complete == cover.complete);
  CHECK(back.variables == cover.variables);
  CHECK(serialize_cover(back) == text);
  CHECK(text.find("\"count\"") != std::string::npos);
  CHECK_THROWS_AS(parse_cover("{}"), SchemaError);
}

TEST_CASE("covers of random pairs are prime, irredundant and complete") {
  oracle::PairGenerator gen(2024);
  int checked = 0;
  while (checked < 150) {
    auto p = gen.next(7);
    auto m = Matching::build("rand", p.classes, p.trees);
    auto iface = compute_interface(m, "ta", "tb");
    if (iface.input_variables().size() > 10) continue;
    ++checked;
    auto ref = oracle::ref_interface(m, "ta", "tb");
    auto tt = oracle::truth_table(m, ref, "ta", "tb");
    auto xs = tt.xor_set();
    auto cover = enumerate_cover(compile(m.tree("ta"), iface), compile(m.tree("tb"), iface));
    std::set<std::uint64_t> seen;
    for (const auto& pi : cover.pis) {
      auto rows = oracle::cube(tt, pi.fixed);
      bool fresh = false;
      for (auto r : rows) {
        CHECK(xs.count(r));
        fresh = fresh || !seen.count(r);
      }
      CHECK(fresh);  // each PI covers something no earlier PI did
      seen.insert(rows.begin(), rows.end());
      // covers() matches cube membership.
      for (std::uint64_t r = 0; r < tt.size(); ++r) {
        CHECK(covers(pi, tt.env(r)) == (std::find(rows.begin(), rows.end(), r) != rows.end()));
      }
    }
    CHECK(seen == xs);
    CHECK(cover.iterations <= xs.size());
  }
}
