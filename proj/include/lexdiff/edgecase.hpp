#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexdiff/bool_expr.hpp"
#include "lexdiff/satkit.hpp"

namespace lexdiff {

inline constexpr std::size_t kDefaultPiCap = 100000;

/// Identifies an analyzed pair of formalizations of one provision.
struct PairId {
  std::string provision_id;
  std::string tree_a;
  std::string tree_b;

  auto operator<=>(const PairId&) const = default;
  bool operator==(const PairId&) const = default;
};

/// Minimal partial assignment under which the two root functions disagree
/// for every completion of the unfixed inputs.
struct PrimeImplicant {
  Assignment fixed;
  PairId pair;

  friend bool operator==(const PrimeImplicant&, const PrimeImplicant&) = default;
};

struct EdgeCaseCover {
  PairId pair;
  std::vector<std::string> variables;  // input universe, sorted
  std::vector<PrimeImplicant> pis;     // emission order
  bool complete = false;
  bool cap_hit = false;
  /// Number of disagreements found by the outer search (one per PI).
  std::size_t iterations = 0;
};

/// True iff no input assignment distinguishes fa from fb.
bool equivalent(const BoolExpr& fa, const BoolExpr& fb, SolverLimits limits = {});

/// Irredundant prime-implicant cover of fa XOR fb by SAT-iterative search:
/// find an uncovered disagreement, shrink it to an implicant through the
/// unsat core of the agreement check, drop literals greedily in ascending
/// variable order until prime, block it, repeat. Stops with cap_hit once
/// `cap` implicants are out and disagreements remain uncovered.
EdgeCaseCover enumerate_cover(const BoolExpr& fa, const BoolExpr& fb,
                              std::optional<std::size_t> cap = kDefaultPiCap, PairId pair = {},
                              SolverLimits limits = {});

/// True iff `assignment` agrees with every fixed literal of `pi`.
bool covers(const PrimeImplicant& pi, const Assignment& assignment);

std::string serialize_cover(const EdgeCaseCover& cover);
EdgeCaseCover parse_cover(std::string_view text);

}  // namespace lexdiff
