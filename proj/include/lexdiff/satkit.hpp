#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lexdiff/bool_expr.hpp"

namespace lexdiff {

struct Literal {
  std::string var;
  bool positive = true;

  Literal operator~() const { return {var, !positive}; }
  std::string to_string() const { return (positive ? "" : "-") + var; }

  auto operator<=>(const Literal&) const = default;
  bool operator==(const Literal&) const = default;
};

using Clause = std::vector<Literal>;

/// Clause set over named variables. Auxiliary (encoding) variables are kept
/// apart from the original ones so models can be projected.
class CnfFormula {
 public:
  const std::vector<Clause>& clauses() const { return clauses_; }
  const std::set<std::string>& originals() const { return originals_; }
  const std::set<std::string>& auxiliaries() const { return auxiliaries_; }

  void add_original(const std::string& var);
  void add_auxiliary(const std::string& var);
  /// Every literal's variable must already be registered.
  void add_clause(Clause clause);

 private:
  std::vector<Clause> clauses_;
  std::set<std::string> originals_;
  std::set<std::string> auxiliaries_;
};

/// Tseitin encoder. Each encoded sub-formula gets a literal that is
/// equivalent to it under every model of the emitted clauses; structurally
/// identical sub-formulas share one literal.
class CnfBuilder {
 public:
  /// `reserved` are the original variable names; auxiliary names are chosen
  /// so they never collide with them.
  explicit CnfBuilder(const std::set<std::string>& reserved);

  Literal encode(const BoolExpr& e);
  /// Literal equivalent to a XOR b.
  Literal define_xor(const Literal& a, const Literal& b);
  Literal fresh();
  void add_clause(Clause clause);

  const CnfFormula& formula() const { return formula_; }
  /// Clauses emitted since the previous call; lets a solver be fed
  /// incrementally while the builder keeps its sharing cache.
  std::vector<Clause> take_new_clauses();

 private:
  CnfFormula formula_;
  std::string prefix_;
  std::size_t next_aux_ = 0;
  std::size_t drained_ = 0;
  std::map<std::string, Literal> cache_;
};

/// CNF asserting e (asserted = true) or its negation.
CnfFormula tseitin(const BoolExpr& e, bool asserted);
/// CNF asserting fa XOR fb (asserted = true) or fa XNOR fb.
CnfFormula miter(const BoolExpr& fa, const BoolExpr& fb, bool asserted);

struct SatOutcome {
  bool sat = false;
  /// Total over the solver's non-auxiliary variables when sat.
  Assignment model;
  /// Subset of the supplied assumptions sufficient for unsatisfiability.
  std::vector<Literal> core;
};

struct SolverLimits {
  std::int64_t max_conflicts = -1;  // per solve call; negative disables
  double max_seconds = -1.0;        // per solve call; negative disables
};

namespace detail {
class Cdcl;
}

/// Incremental CDCL solver over named variables. Supports adding clauses
/// between calls, solving under assumptions with core extraction, and scoped
/// temporary clauses via push()/pop(). Branching is deterministic. Not
/// thread-safe; use one instance per thread.
class Solver {
 public:
  Solver();
  ~Solver();
  Solver(Solver&&) noexcept;
  Solver& operator=(Solver&&) noexcept;
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  void set_limits(SolverLimits limits) { limits_ = limits; }

  void add_formula(const CnfFormula& f);
  void add_clause(std::span<const Literal> clause);
  void add_clauses(std::span<const Clause> clauses);
  void mark_auxiliary(const std::string& var);

  /// Opens a scope; clauses added until the matching pop() are retracted then.
  void push();
  void pop();
  std::size_t scope_depth() const { return selectors_.size(); }

  /// Throws ResourceLimit when the configured budget runs out.
  SatOutcome solve(std::span<const Literal> assumptions = {});

  std::size_t num_vars() const { return names_.size(); }
  std::uint64_t conflicts() const;

 private:
  int var_index(const std::string& name);
  int lit_of(const Literal& l);

  std::unique_ptr<detail::Cdcl> core_;
  SolverLimits limits_;
  std::map<std::string, int> index_;
  std::vector<std::string> names_;
  std::vector<bool> hidden_;  // auxiliary or selector
  std::vector<int> selectors_;
  std::vector<std::size_t> scope_marks_;
};

/// One-shot solve of a formula under assumptions.
SatOutcome solve(const CnfFormula& f, std::span<const Literal> assumptions,
                 SolverLimits limits = {});

/// All satisfying assignments of e over variables(e), in binary counting
/// order (first variable most significant). Throws TooManyVariables above
/// `max_vars`.
std::vector<Assignment> brute_force_models(const BoolExpr& e, std::size_t max_vars = 20);

/// DIMACS text; variables are numbered 1.. in sorted name order, originals
/// first. Comment lines map numbers back to names.
std::string to_dimacs(const CnfFormula& f);

}  // namespace lexdiff
