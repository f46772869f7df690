#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lexdiff/formal_model.hpp"

namespace lexdiff {

using Assignment = std::map<std::string, bool>;

/// Boolean formula over named variables using the four formalization
/// operators. Operators take one or more operands; a one-operand AND/OR is the
/// identity and a one-operand NAND/NOR is negation.
class BoolExpr {
 public:
  static BoolExpr variable(std::string id);
  static BoolExpr apply(Operator op, std::vector<BoolExpr> operands);

  bool is_variable() const { return operands_.empty(); }
  const std::string& var() const { return var_; }
  Operator op() const { return op_; }
  const std::vector<BoolExpr>& operands() const { return operands_; }

  /// Compact prefix form, e.g. `NAND(a, b)`.
  std::string to_string() const;

  friend bool operator==(const BoolExpr&, const BoolExpr&) = default;

 private:
  BoolExpr() = default;

  std::string var_;
  Operator op_ = Operator::And;
  std::vector<BoolExpr> operands_;
};

std::set<std::string> variables(const BoolExpr& e);

/// Throws UnboundVariable when a variable of `e` is missing from `assignment`.
bool eval(const BoolExpr& e, const Assignment& assignment);

}  // namespace lexdiff
