#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lexdiff/ec_graph.hpp"
#include "lexdiff/edgecase.hpp"
#include "lexdiff/interface.hpp"

namespace lexdiff {

inline constexpr std::size_t kDefaultRepresentativeCap = 25;

/// Shared EC at which the two sub-formulas are forced apart by a PI while
/// none of its child ECs is.
struct RootCause {
  std::string ec_id;
  /// Tree whose sub-formula is forced true at this EC; nullopt means mixed.
  std::optional<std::string> true_tree;

  friend bool operator==(const RootCause&, const RootCause&) = default;
};

/// Local shape of one side at a root cause.
struct SideShape {
  std::optional<Operator> base;  // AND/OR after folding negation; nullopt for a leaf
  bool negated = false;
  std::vector<std::string> child_ecs;  // sorted

  auto operator<=>(const SideShape&) const = default;
  bool operator==(const SideShape&) const = default;
};

struct SignatureEntry {
  std::string ec_id;
  SideShape true_side;   // with `mixed`, the lesser of the two shapes
  SideShape false_side;  // with `mixed`, the greater of the two shapes

  friend bool operator==(const SignatureEntry&, const SignatureEntry&) = default;
};

/// Canonical disagreement shape: independent of which tree is A or B.
struct Signature {
  std::vector<SignatureEntry> entries;  // sorted by ec_id
  /// Neither root conclusion is forced by the PI.
  bool mixed = false;

  std::string canonical() const;
  std::string digest() const;
  friend bool operator==(const Signature&, const Signature&) = default;
};

/// Per-pair root-cause machinery. Encodes every candidate EC once and answers
/// queries for any number of PIs of that pair.
class RootCauseAnalyzer {
 public:
  RootCauseAnalyzer(const Matching& m, const Interface& iface, SolverLimits limits = {});
  ~RootCauseAnalyzer();
  RootCauseAnalyzer(RootCauseAnalyzer&&) noexcept;
  RootCauseAnalyzer& operator=(RootCauseAnalyzer&&) noexcept;

  /// Shared ECs on or above the interface in both trees, sorted.
  const std::vector<std::string>& candidates() const;
  /// Condition (i): the PI forces the sub-formulas at `ec_id` to differ.
  bool forced_apart(const PrimeImplicant& pi, const std::string& ec_id);
  std::vector<RootCause> root_causes(const PrimeImplicant& pi);
  /// Tree whose root function the PI forces true; nullopt when neither.
  std::optional<std::string> concluding_tree(const PrimeImplicant& pi);
  /// Local shapes at the deepest of `causes`: those with no other cause
  /// below them in either tree.
  Signature signature(const PrimeImplicant& pi, const std::vector<RootCause>& causes);

 private:
  struct State;
  std::unique_ptr<State> state_;
};

std::vector<RootCause> root_causes(const PrimeImplicant& pi, const Interface& iface,
                                   const Matching& m);

Signature signature_of(const PrimeImplicant& pi, const std::vector<RootCause>& causes,
                       const Interface& iface, const Matching& m);

/// Everything the selection needs about one analyzed pair.
struct PairAnalysis {
  Interface iface;
  EdgeCaseCover cover;
};

struct TriageOptions {
  std::size_t cap = kDefaultRepresentativeCap;
  double coverage_threshold = kDefaultCoverageThreshold;
  SolverLimits limits;
};

struct Representative {
  Signature signature;
  PrimeImplicant pi;
  std::vector<RootCause> root_causes;
  std::size_t class_size = 0;
  /// Labels of every input of the witnessing pair's interface.
  std::map<std::string, std::string> variable_labels;
};

/// Filters pairs (coverage, root operator), groups PIs by signature, keeps
/// the smallest PI per class, then applies the per-provision cap by dropping
/// the largest representatives. Output is ordered by (size, pair, fixed).
std::vector<Representative> select_representatives(const Matching& m,
                                                   std::span<const PairAnalysis> pairs,
                                                   const TriageOptions& options = {});

/// Human-readable name of an EC: its label, else its first member's label.
std::string ec_label(const Matching& m, const std::string& ec_id);
/// Label of an interface input (cut EC or private subtree root).
std::string variable_label(const Matching& m, const Interface& iface, const std::string& var);

std::string serialize_representatives(const Matching& m, std::span<const Representative> reps);

}  // namespace lexdiff
