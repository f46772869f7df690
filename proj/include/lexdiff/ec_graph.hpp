#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexdiff/formal_model.hpp"

namespace lexdiff {

/// One node of one formalization.
struct Atom {
  std::string tree_id;
  std::string node_id;

  auto operator<=>(const Atom&) const = default;
  bool operator==(const Atom&) const = default;
};

std::string to_string(const Atom& atom);

struct EquivalenceClass {
  std::string ec_id;
  std::optional<std::string> label;
  std::vector<Atom> members;  // sorted, at most one per tree
};

/// Unordered atom pair, stored with first < second.
using AtomPair = std::pair<Atom, Atom>;
using PairSet = std::set<AtomPair>;

/// A validated partition of all nodes of a set of formalizations into
/// equivalence classes, together with the EC-level parent/child relation
/// lifted from the tree edges.
class Matching {
 public:
  /// Validates and indexes. Throws PartitionError, DuplicateTreeInEC,
  /// CycleError or SchemaError.
  static Matching build(std::string provision_id, std::vector<EquivalenceClass> classes,
                        std::span<const Formalization> trees);

  const std::string& provision_id() const { return provision_id_; }
  const std::vector<EquivalenceClass>& classes() const { return classes_; }
  const EquivalenceClass& ec(const std::string& ec_id) const;
  bool has_ec(const std::string& ec_id) const { return ec_index_.count(ec_id) != 0; }

  const std::string& ec_of(const Atom& atom) const;
  const std::string& ec_of(const std::string& tree_id, const std::string& node_id) const {
    return ec_of(Atom{tree_id, node_id});
  }
  /// The node a tree contributes to an EC, if any.
  std::optional<std::string> node_in(const std::string& ec_id, const std::string& tree_id) const;

  const std::set<std::pair<std::string, std::string>>& ec_edges() const { return ec_edges_; }

  const std::map<std::string, Formalization>& trees() const { return trees_; }
  const Formalization& tree(const std::string& tree_id) const;
  bool has_tree(const std::string& tree_id) const { return trees_.count(tree_id) != 0; }

  const std::vector<std::string>& warnings() const { return warnings_; }
  void add_warning(std::string warning) { warnings_.push_back(std::move(warning)); }

 private:
  std::string provision_id_;
  std::vector<EquivalenceClass> classes_;
  std::map<std::string, std::size_t> ec_index_;
  std::map<Atom, std::string> atom_to_ec_;
  std::set<std::pair<std::string, std::string>> ec_edges_;
  std::map<std::string, Formalization> trees_;
  std::vector<std::string> warnings_;
};

/// Parses a matching document against the formalizations it partitions.
/// Supplied "edges" are ignored with a warning; EC edges are always derived.
Matching parse_matching(std::string_view text, std::span<const Formalization> formalizations);

std::string serialize(const Matching& m);

/// All unordered pairs of atoms that share an EC.
PairSet co_membership(const Matching& m);

/// |intersection| / |union| over the runs' pair sets; nullopt when the union
/// is empty. Throws EmptyInput for an empty run list.
std::optional<double> jaccard_n(std::span<const PairSet> runs);

/// ECs holding a node of both trees. Throws UnknownTree.
std::set<std::string> shared_ecs(const Matching& m, const std::string& tree_a,
                                 const std::string& tree_b);

}  // namespace lexdiff
