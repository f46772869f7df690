#include "lexdiff/edgecase.hpp"

#include <algorithm>

#include "lexdiff/errors.hpp"
#include "support.hpp"

namespace lexdiff {

using detail::json;

bool equivalent(const BoolExpr& fa, const BoolExpr& fb, SolverLimits limits) {
  return !solve(miter(fa, fb, true), {}, limits).sat;
}

EdgeCaseCover enumerate_cover(const BoolExpr& fa, const BoolExpr& fb, std::optional<std::size_t> cap,
                              PairId pair, SolverLimits limits) {
  if (cap && *cap == 0) throw SchemaError("PI cap must be positive");

  EdgeCaseCover cover;
  cover.pair = std::move(pair);
  auto vars = variables(fa);
  vars.merge(variables(fb));
  cover.variables.assign(vars.begin(), vars.end());

  Solver disagree;  // phi plus blocking clauses
  Solver agree;     // not phi
  disagree.set_limits(limits);
  agree.set_limits(limits);
  disagree.add_formula(miter(fa, fb, true));
  agree.add_formula(miter(fa, fb, false));

  std::vector<Literal> minterm;
  minterm.reserve(cover.variables.size());
  for (;;) {
    auto found = disagree.solve();
    if (!found.sat) {
      cover.complete = true;
      break;
    }
    if (cap && cover.pis.size() >= *cap) {
      cover.cap_hit = true;
      break;
    }
    ++cover.iterations;

    minterm.clear();
    for (const auto& var : cover.variables) minterm.push_back({var, found.model.at(var)});
    auto check = agree.solve(minterm);
    if (check.sat) throw InternalError("disagreement minterm satisfies the agreement formula");

    std::vector<Literal> cube = check.core;
    std::sort(cube.begin(), cube.end());
    const std::vector<Literal> order = cube;
    for (const auto& lit : order) {
      std::vector<Literal> trial;
      trial.reserve(cube.size());
      std::copy_if(cube.begin(), cube.end(), std::back_inserter(trial),
                   [&](const Literal& l) { return l.var != lit.var; });
      // Assumptions are retracted after each call, so the reduced cube needs
      // no scoped clauses of its own.
      if (!agree.solve(trial).sat) cube = std::move(trial);
    }

    PrimeImplicant pi;
    pi.pair = cover.pair;
    Clause blocking;
    for (const auto& lit : cube) {
      pi.fixed.emplace(lit.var, lit.positive);
      blocking.push_back(~lit);
    }
    disagree.add_clause(blocking);
    cover.pis.push_back(std::move(pi));
  }
  return cover;
}

bool covers(const PrimeImplicant& pi, const Assignment& assignment) {
  return std::all_of(pi.fixed.begin(), pi.fixed.end(), [&](const auto& entry) {
    auto it = assignment.find(entry.first);
    return it != assignment.end() && it->second == entry.second;
  });
}

std::string serialize_cover(const EdgeCaseCover& cover) {
  json pis = json::array();
  for (const auto& pi : cover.pis) {
    json fixed = json::object();
    for (const auto& [var, value] : pi.fixed) fixed[var] = value;
    pis.push_back({{"fixed", std::move(fixed)}});
  }
  json doc{{"provision_id", cover.pair.provision_id},
           {"pair", {cover.pair.tree_a, cover.pair.tree_b}},
           {"complete", cover.complete},
           {"cap_hit", cover.cap_hit},
           {"count", cover.pis.size()},
           {"iterations", cover.iterations},
           {"variables", cover.variables},
           {"pis", std::move(pis)}};
  return doc.dump(2) + "\n";
}

EdgeCaseCover parse_cover(std::string_view text) {
  json doc = detail::parse_strict(text, "cover");
  EdgeCaseCover cover;
  try {
    cover.pair.provision_id = doc.at("provision_id").get<std::string>();
    const auto& pair = doc.at("pair");
    if (!pair.is_array() || pair.size() != 2) throw SchemaError("cover: 'pair' must hold two tree ids");
    cover.pair.tree_a = pair[0].get<std::string>();
    cover.pair.tree_b = pair[1].get<std::string>();
    cover.complete = doc.at("complete").get<bool>();
    cover.cap_hit = doc.at("cap_hit").get<bool>();
    cover.iterations = doc.value("iterations", std::size_t{0});
    cover.variables = doc.value("variables", std::vector<std::string>{});
    for (const auto& entry : doc.at("pis")) {
      PrimeImplicant pi;
      pi.pair = cover.pair;
      for (const auto& [var, value] : entry.at("fixed").items()) pi.fixed.emplace(var, value.get<bool>());
      cover.pis.push_back(std::move(pi));
    }
    if (doc.at("count").get<std::size_t>() != cover.pis.size()) {
      throw SchemaError("cover: 'count' disagrees with the number of implicants");
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("cover: ") + e.what());
  }
  return cover;
}

}  // namespace lexdiff
