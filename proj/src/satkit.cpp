#include "lexdiff/satkit.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "cdcl.hpp"
#include "lexdiff/errors.hpp"

namespace lexdiff {

void CnfFormula::add_original(const std::string& var) {
  if (var.empty()) throw SchemaError("variable id must be nonempty");
  if (auxiliaries_.count(var)) throw SchemaError("'" + var + "' is already auxiliary");
  originals_.insert(var);
}

void CnfFormula::add_auxiliary(const std::string& var) {
  if (var.empty()) throw SchemaError("variable id must be nonempty");
  if (originals_.count(var)) throw SchemaError("'" + var + "' is already an original variable");
  auxiliaries_.insert(var);
}

void CnfFormula::add_clause(Clause clause) {
  for (const auto& lit : clause) {
    if (!originals_.count(lit.var) && !auxiliaries_.count(lit.var)) {
      throw SchemaError("clause mentions unregistered variable '" + lit.var + "'");
    }
  }
  clauses_.push_back(std::move(clause));
}

CnfBuilder::CnfBuilder(const std::set<std::string>& reserved) : prefix_("$t") {
  auto clashes = [&] {
    return std::any_of(reserved.begin(), reserved.end(),
                       [&](const std::string& name) { return name.rfind(prefix_, 0) == 0; });
  };
  while (clashes()) prefix_ += "$";
  for (const auto& name : reserved) formula_.add_original(name);
}

Literal CnfBuilder::fresh() {
  std::string name = prefix_ + std::to_string(next_aux_++);
  formula_.add_auxiliary(name);
  return {name, true};
}

void CnfBuilder::add_clause(Clause clause) { formula_.add_clause(std::move(clause)); }

Literal CnfBuilder::encode(const BoolExpr& e) {
  if (e.is_variable()) {
    if (!formula_.originals().count(e.var())) formula_.add_original(e.var());
    return {e.var(), true};
  }
  const std::string key = e.to_string();
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;

  std::vector<Literal> inputs;
  inputs.reserve(e.operands().size());
  for (const auto& operand : e.operands()) inputs.push_back(encode(operand));

  Literal gate;
  if (inputs.size() == 1) {
    gate = inputs.front();
  } else {
    gate = fresh();
    // AND: gate -> each input, all inputs -> gate. OR is the dual.
    const bool conj = base_operator(e.op()) == Operator::And;
    Clause big{conj ? gate : ~gate};
    for (const auto& in : inputs) {
      add_clause(conj ? Clause{~gate, in} : Clause{gate, ~in});
      big.push_back(conj ? ~in : in);
    }
    add_clause(std::move(big));
  }
  if (is_negated(e.op())) gate = ~gate;
  cache_.emplace(key, gate);
  return gate;
}

Literal CnfBuilder::define_xor(const Literal& a, const Literal& b) {
  Literal x = fresh();
  add_clause({~x, a, b});
  add_clause({~x, ~a, ~b});
  add_clause({x, ~a, b});
  add_clause({x, a, ~b});
  return x;
}

std::vector<Clause> CnfBuilder::take_new_clauses() {
  const auto& all = formula_.clauses();
  std::vector<Clause> out(all.begin() + static_cast<std::ptrdiff_t>(drained_), all.end());
  drained_ = all.size();
  return out;
}

CnfFormula tseitin(const BoolExpr& e, bool asserted) {
  CnfBuilder builder(variables(e));
  Literal root = builder.encode(e);
  builder.add_clause({asserted ? root : ~root});
  return builder.formula();
}

CnfFormula miter(const BoolExpr& fa, const BoolExpr& fb, bool asserted) {
  auto vars = variables(fa);
  vars.merge(variables(fb));
  CnfBuilder builder(vars);
  Literal a = builder.encode(fa);
  Literal b = builder.encode(fb);
  Literal x = builder.define_xor(a, b);
  builder.add_clause({asserted ? x : ~x});
  return builder.formula();
}

// ---------------------------------------------------------------------------

Solver::Solver() : core_(std::make_unique<detail::Cdcl>()) {}
Solver::~Solver() = default;
Solver::Solver(Solver&&) noexcept = default;
Solver& Solver::operator=(Solver&&) noexcept = default;

std::uint64_t Solver::conflicts() const { return core_->conflicts(); }

int Solver::var_index(const std::string& name) {
  if (auto it = index_.find(name); it != index_.end()) return it->second;
  int v = core_->new_var();
  index_.emplace(name, v);
  names_.push_back(name);
  hidden_.push_back(false);
  return v;
}

int Solver::lit_of(const Literal& l) {
  if (l.var.empty()) throw SchemaError("literal with empty variable id");
  return detail::make_lit(var_index(l.var), !l.positive);
}

void Solver::mark_auxiliary(const std::string& var) {
  hidden_[static_cast<std::size_t>(var_index(var))] = true;
}

void Solver::add_formula(const CnfFormula& f) {
  for (const auto& var : f.originals()) var_index(var);
  for (const auto& var : f.auxiliaries()) mark_auxiliary(var);
  add_clauses(f.clauses());
}

void Solver::add_clauses(std::span<const Clause> clauses) {
  for (const auto& clause : clauses) add_clause(clause);
}

void Solver::add_clause(std::span<const Literal> clause) {
  std::vector<detail::Lit> lits;
  lits.reserve(clause.size() + 1);
  for (const auto& l : clause) lits.push_back(lit_of(l));
  if (!selectors_.empty()) lits.push_back(detail::make_lit(selectors_.back(), true));
  core_->add_clause(std::move(lits));
}

void Solver::push() {
  int s = core_->new_var();
  names_.push_back("");
  hidden_.push_back(true);
  selectors_.push_back(s);
  scope_marks_.push_back(core_->clause_count());
}

void Solver::pop() {
  if (selectors_.empty()) throw InternalError("pop() without matching push()");
  int s = selectors_.back();
  selectors_.pop_back();
  std::size_t mark = scope_marks_.back();
  scope_marks_.pop_back();
  detail::Lit off = detail::make_lit(s, true);
  core_->add_clause({off});
  core_->remove_clauses_with(off, mark);
}

SatOutcome Solver::solve(std::span<const Literal> assumptions) {
  std::vector<detail::Lit> lits;
  lits.reserve(selectors_.size() + assumptions.size());
  for (int s : selectors_) lits.push_back(detail::make_lit(s, false));
  for (const auto& a : assumptions) lits.push_back(lit_of(a));

  std::optional<std::chrono::steady_clock::time_point> deadline;
  if (limits_.max_seconds >= 0) {
    deadline = std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                   std::chrono::duration<double>(limits_.max_seconds));
  }
  auto status = core_->solve(lits, limits_.max_conflicts, deadline);
  if (status == detail::Cdcl::Status::Budget) {
    throw ResourceLimit("SAT budget exhausted after " + std::to_string(core_->conflicts()) + " conflicts");
  }

  SatOutcome out;
  if (status == detail::Cdcl::Status::Sat) {
    out.sat = true;
    const auto& model = core_->model();
    for (std::size_t v = 0; v < names_.size(); ++v) {
      if (!hidden_[v]) out.model.emplace(names_[v], model[v]);
    }
    return out;
  }
  std::set<detail::Lit> failed;
  for (detail::Lit l : core_->final_conflict()) failed.insert(detail::negate(l));
  std::set<Literal> emitted;
  for (const auto& a : assumptions) {
    if (failed.count(lit_of(a)) && emitted.insert(a).second) out.core.push_back(a);
  }
  return out;
}

SatOutcome solve(const CnfFormula& f, std::span<const Literal> assumptions, SolverLimits limits) {
  Solver solver;
  solver.set_limits(limits);
  solver.add_formula(f);
  return solver.solve(assumptions);
}

std::vector<Assignment> brute_force_models(const BoolExpr& e, std::size_t max_vars) {
  auto vars = variables(e);
  if (vars.size() > max_vars) {
    throw TooManyVariables(std::to_string(vars.size()) + " variables exceed the bound of " +
                           std::to_string(max_vars));
  }
  std::vector<std::string> names(vars.begin(), vars.end());
  std::vector<Assignment> out;
  const std::uint64_t total = std::uint64_t{1} << names.size();
  Assignment a;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      a[names[i]] = ((bits >> (names.size() - 1 - i)) & 1U) != 0;
    }
    if (eval(e, a)) out.push_back(a);
  }
  return out;
}

std::string to_dimacs(const CnfFormula& f) {
  std::map<std::string, std::size_t> number;
  for (const auto& v : f.originals()) number.emplace(v, number.size() + 1);
  for (const auto& v : f.auxiliaries()) number.emplace(v, number.size() + 1);
  std::ostringstream out;
  for (const auto& [name, n] : number) {
    out << "c " << n << " " << name << (f.auxiliaries().count(name) ? " aux" : "") << "\n";
  }
  out << "p cnf " << number.size() << " " << f.clauses().size() << "\n";
  for (const auto& clause : f.clauses()) {
    for (const auto& lit : clause) {
      out << (lit.positive ? "" : "-") << number.at(lit.var) << " ";
    }
    out << "0\n";
  }
  return out.str();
}

}  // namespace lexdiff
