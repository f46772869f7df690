#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lexdiff/bool_expr.hpp"
#include "lexdiff/ec_graph.hpp"
#include "lexdiff/formal_model.hpp"

namespace lexdiff {

inline constexpr double kDefaultCoverageThreshold = 0.4;

/// Free input standing for a maximal subtree that holds no interface EC.
struct PrivateVar {
  std::string id;
  std::string tree_id;
  std::string node_id;  // root of the abstracted subtree

  friend bool operator==(const PrivateVar&, const PrivateVar&) = default;
};

/// Pairwise Boolean vocabulary for two formalizations.
struct Interface {
  std::string tree_a;
  std::string tree_b;
  std::vector<std::string> shared_ecs;  // sorted
  std::vector<std::string> cut_ecs;     // sorted antichain of shared ECs
  std::vector<PrivateVar> private_vars;  // sorted by id
  double cov_a = 0.0;
  double cov_b = 0.0;
  double cov_pair = 0.0;
  /// Set when the trees share no EC at all; the interface is then empty.
  bool no_shared = false;

  /// tree_id -> node_id -> ec_id, for the nodes that carry a cut EC.
  std::map<std::string, std::map<std::string, std::string>> cut_nodes;

  bool is_cut(const std::string& ec_id) const;
  /// Private variable rooted at (tree, node), if any.
  const PrivateVar* private_var(const std::string& tree_id, const std::string& node_id) const;
  /// Cut ECs plus private variable ids.
  std::vector<std::string> input_variables() const;
};

/// Where a node sits relative to the interface of its tree.
enum class Placement {
  AboveCut,     // strict ancestor of a cut node
  AtCut,        // carries a cut EC
  PrivateRoot,  // root of a maximal cut-free subtree
  Abstracted,   // below a cut node or inside a private subtree
};

Interface compute_interface(const Matching& m, const std::string& tree_a,
                            const std::string& tree_b);

Placement placement(const Formalization& f, const Interface& iface, const std::string& node_id);

/// Translates `f` into a formula over the interface inputs.
BoolExpr compile(const Formalization& f, const Interface& iface);

/// Compiled sub-formula rooted at `node_id`; nullopt for abstracted nodes.
std::optional<BoolExpr> compile_at(const Formalization& f, const Interface& iface,
                                   const std::string& node_id);

/// One JSON object per interface: pair, cut_ecs, private_vars, coverages.
std::string serialize_interfaces(std::span<const Interface> interfaces);

}  // namespace lexdiff
