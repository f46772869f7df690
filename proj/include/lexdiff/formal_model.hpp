#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lexdiff {

enum class Operator { And, Or, Nand, Nor };

std::string_view to_string(Operator op);
/// Accepts exactly "AND", "OR", "NAND", "NOR"; anything else is a SchemaError.
Operator parse_operator(std::string_view token);

/// AND/OR base of an operator; NAND and NOR are negated AND and OR.
Operator base_operator(Operator op);
bool is_negated(Operator op);

struct Node {
  std::string id;
  std::string label;
  std::optional<Operator> op;  // present iff children is nonempty
  std::vector<std::string> children;

  bool is_leaf() const { return children.empty(); }
  friend bool operator==(const Node&, const Node&) = default;
};

/// A rooted, labeled tree with a logical operator at every internal node.
/// Values produced by parse_formalization satisfy every structural invariant;
/// a hand-built value may not, and validate() reports why.
struct Formalization {
  std::string tree_id;
  std::string provision_id;
  std::string root;
  std::map<std::string, Node> nodes;

  const Node& node(const std::string& id) const;
  bool contains(const std::string& id) const { return nodes.count(id) != 0; }

  friend bool operator==(const Formalization&, const Formalization&) = default;
};

enum class ViolationRule {
  EmptyTree,
  MissingRoot,
  RootHasParent,
  EmptyLabel,
  IdMismatch,
  DuplicateId,
  MissingOperator,
  LeafWithOperator,
  UnknownChild,
  DuplicateChild,
  MultipleParents,
  Cycle,
  Unreachable,
};

std::string_view to_string(ViolationRule rule);

struct Violation {
  ViolationRule rule;
  std::string node_id;

  /// Renders as `Rule(node_id)`, e.g. `MissingOperator(n3)`.
  std::string to_string() const;
  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Parses and validates one formalization document. Throws SchemaError for a
/// malformed document and StructureError when tree invariants fail.
Formalization parse_formalization(std::string_view text);

/// Checks every structural invariant. Violations are ordered by node id, then
/// rule, so the output is stable.
std::vector<Violation> validate(const Formalization& f);

std::string serialize(const Formalization& f);

std::set<std::string> leaves(const Formalization& f);
std::set<std::string> internal_nodes(const Formalization& f);

}  // namespace lexdiff
