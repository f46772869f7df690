#include "lexdiff/bool_expr.hpp"

#include "lexdiff/errors.hpp"

namespace lexdiff {

BoolExpr BoolExpr::variable(std::string id) {
  if (id.empty()) throw SchemaError("variable id must be nonempty");
  BoolExpr e;
  e.var_ = std::move(id);
  return e;
}

BoolExpr BoolExpr::apply(Operator op, std::vector<BoolExpr> operands) {
  if (operands.empty()) throw SchemaError("operator application needs at least one operand");
  BoolExpr e;
  e.op_ = op;
  e.operands_ = std::move(operands);
  return e;
}

std::string BoolExpr::to_string() const {
  if (is_variable()) return var_;
  std::string out(lexdiff::to_string(op_));
  out += "(";
  for (std::size_t i = 0; i < operands_.size(); ++i) {
    if (i) out += ", ";
    out += operands_[i].to_string();
  }
  return out + ")";
}

namespace {

void collect(const BoolExpr& e, std::set<std::string>& out) {
  if (e.is_variable()) {
    out.insert(e.var());
    return;
  }
  for (const auto& operand : e.operands()) collect(operand, out);
}

}  // namespace

std::set<std::string> variables(const BoolExpr& e) {
  std::set<std::string> out;
  collect(e, out);
  return out;
}

bool eval(const BoolExpr& e, const Assignment& assignment) {
  if (e.is_variable()) {
    auto it = assignment.find(e.var());
    if (it == assignment.end()) throw UnboundVariable("variable '" + e.var() + "' is unbound");
    return it->second;
  }
  const bool conjunctive = base_operator(e.op()) == Operator::And;
  // Every operand is evaluated so unbound variables are reported regardless of
  // short-circuiting.
  bool acc = conjunctive;
  for (const auto& operand : e.operands()) {
    bool v = eval(operand, assignment);
    acc = conjunctive ? (acc && v) : (acc || v);
  }
  return is_negated(e.op()) ? !acc : acc;
}

}  // namespace lexdiff
