#include "lexdiff/ec_graph.hpp"

#include <algorithm>
#include <functional>

#include "lexdiff/errors.hpp"
#include "support.hpp"

namespace lexdiff {

using detail::json;

std::string to_string(const Atom& atom) { return "(" + atom.tree_id + ", " + atom.node_id + ")"; }

Matching Matching::build(std::string provision_id, std::vector<EquivalenceClass> classes,
                         std::span<const Formalization> trees) {
  Matching m;
  m.provision_id_ = std::move(provision_id);
  for (const auto& tree : trees) {
    if (!m.trees_.emplace(tree.tree_id, tree).second) {
      throw SchemaError("formalization '" + tree.tree_id + "' supplied twice");
    }
    if (!m.provision_id_.empty() && tree.provision_id != m.provision_id_) {
      m.warnings_.push_back("formalization '" + tree.tree_id + "' belongs to provision '" +
                            tree.provision_id + "', matching is for '" + m.provision_id_ + "'");
    }
  }

  std::sort(classes.begin(), classes.end(),
            [](const auto& a, const auto& b) { return a.ec_id < b.ec_id; });
  for (auto& ec : classes) {
    if (ec.ec_id.empty()) throw SchemaError("equivalence class with empty ec_id");
    if (ec.members.empty()) throw SchemaError("equivalence class '" + ec.ec_id + "' has no members");
    std::sort(ec.members.begin(), ec.members.end());
    std::set<std::string> seen_trees;
    for (const auto& atom : ec.members) {
      auto tree = m.trees_.find(atom.tree_id);
      if (tree == m.trees_.end() || !tree->second.contains(atom.node_id)) {
        throw PartitionError("EC '" + ec.ec_id + "' references unknown atom " + to_string(atom));
      }
      if (!seen_trees.insert(atom.tree_id).second) {
        throw DuplicateTreeInEC("EC '" + ec.ec_id + "' holds more than one node of tree '" +
                                atom.tree_id + "'");
      }
      auto [it, inserted] = m.atom_to_ec_.emplace(atom, ec.ec_id);
      if (!inserted) {
        throw PartitionError("atom " + to_string(atom) + " assigned to both '" + it->second +
                             "' and '" + ec.ec_id + "'");
      }
    }
  }
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (!m.ec_index_.emplace(classes[i].ec_id, i).second) {
      throw SchemaError("duplicate ec_id '" + classes[i].ec_id + "'");
    }
  }
  m.classes_ = std::move(classes);

  for (const auto& [tree_id, tree] : m.trees_) {
    for (const auto& [node_id, node] : tree.nodes) {
      Atom atom{tree_id, node_id};
      if (!m.atom_to_ec_.count(atom)) {
        throw PartitionError("atom " + to_string(atom) + " is not assigned to any EC");
      }
    }
  }

  for (const auto& [tree_id, tree] : m.trees_) {
    for (const auto& [node_id, node] : tree.nodes) {
      const auto& parent_ec = m.atom_to_ec_.at({tree_id, node_id});
      for (const auto& child : node.children) {
        const auto& child_ec = m.atom_to_ec_.at({tree_id, child});
        if (child_ec == parent_ec) {
          throw CycleError("EC '" + parent_ec + "' holds both " + to_string({tree_id, node_id}) +
                           " and its child " + to_string({tree_id, child}));
        }
        m.ec_edges_.emplace(parent_ec, child_ec);
      }
    }
  }

  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& [parent, child] : m.ec_edges_) succ[parent].push_back(child);
  std::map<std::string, int> color;
  std::function<void(const std::string&)> visit = [&](const std::string& ec) {
    color[ec] = 1;
    for (const auto& next : succ[ec]) {
      int c = color[next];
      if (c == 1) throw CycleError("lifted EC relation has a cycle through '" + next + "'");
      if (c == 0) visit(next);
    }
    color[ec] = 2;
  };
  for (const auto& ec : m.classes_) {
    if (color[ec.ec_id] == 0) visit(ec.ec_id);
  }
  return m;
}

const EquivalenceClass& Matching::ec(const std::string& ec_id) const {
  auto it = ec_index_.find(ec_id);
  if (it == ec_index_.end()) throw SchemaError("unknown EC '" + ec_id + "'");
  return classes_[it->second];
}

const std::string& Matching::ec_of(const Atom& atom) const {
  auto it = atom_to_ec_.find(atom);
  if (it == atom_to_ec_.end()) {
    if (!has_tree(atom.tree_id)) throw UnknownTree("tree '" + atom.tree_id + "' is not in the matching");
    throw SchemaError("atom " + to_string(atom) + " is not in the matching");
  }
  return it->second;
}

std::optional<std::string> Matching::node_in(const std::string& ec_id,
                                             const std::string& tree_id) const {
  for (const auto& atom : ec(ec_id).members) {
    if (atom.tree_id == tree_id) return atom.node_id;
  }
  return std::nullopt;
}

const Formalization& Matching::tree(const std::string& tree_id) const {
  auto it = trees_.find(tree_id);
  if (it == trees_.end()) throw UnknownTree("tree '" + tree_id + "' is not in the matching");
  return it->second;
}

Matching parse_matching(std::string_view text, std::span<const Formalization> formalizations) {
  json doc = detail::parse_strict(text, "matching");
  if (!doc.is_object()) throw SchemaError("matching: document must be an object");
  auto provision = doc.find("provision_id");
  if (provision == doc.end() || !provision->is_string()) {
    throw SchemaError("matching: 'provision_id' must be a string");
  }
  auto classes_it = doc.find("classes");
  if (classes_it == doc.end() || !classes_it->is_array()) {
    throw SchemaError("matching: 'classes' must be an array");
  }

  std::vector<EquivalenceClass> classes;
  for (const auto& entry : *classes_it) {
    if (!entry.is_object()) throw SchemaError("matching: each class must be an object");
    EquivalenceClass ec;
    auto id = entry.find("ec_id");
    if (id == entry.end() || !id->is_string()) throw SchemaError("matching: 'ec_id' must be a string");
    ec.ec_id = id->get<std::string>();
    if (auto label = entry.find("label"); label != entry.end() && !label->is_null()) {
      if (!label->is_string()) throw SchemaError("matching: EC '" + ec.ec_id + "' label must be a string");
      ec.label = label->get<std::string>();
    }
    auto members = entry.find("members");
    if (members == entry.end() || !members->is_array()) {
      throw SchemaError("matching: EC '" + ec.ec_id + "' needs a 'members' array");
    }
    for (const auto& member : *members) {
      auto tree = member.find("tree_id");
      auto node = member.find("node_id");
      if (!member.is_object() || tree == member.end() || node == member.end() ||
          !tree->is_string() || !node->is_string()) {
        throw SchemaError("matching: EC '" + ec.ec_id + "' has a malformed member");
      }
      ec.members.push_back({tree->get<std::string>(), node->get<std::string>()});
    }
    classes.push_back(std::move(ec));
  }

  auto m = Matching::build(provision->get<std::string>(), std::move(classes), formalizations);
  if (doc.contains("edges")) m.add_warning("supplied 'edges' ignored; EC edges are derived from the trees");
  return m;
}

std::string serialize(const Matching& m) {
  json classes = json::array();
  for (const auto& ec : m.classes()) {
    json members = json::array();
    for (const auto& atom : ec.members) {
      members.push_back({{"tree_id", atom.tree_id}, {"node_id", atom.node_id}});
    }
    classes.push_back({{"ec_id", ec.ec_id},
                       {"label", ec.label ? json(*ec.label) : json(nullptr)},
                       {"members", std::move(members)}});
  }
  json doc{{"provision_id", m.provision_id()}, {"classes", std::move(classes)}};
  return doc.dump(2) + "\n";
}

PairSet co_membership(const Matching& m) {
  PairSet out;
  for (const auto& ec : m.classes()) {
    for (std::size_t i = 0; i < ec.members.size(); ++i) {
      for (std::size_t j = i + 1; j < ec.members.size(); ++j) {
        out.emplace(ec.members[i], ec.members[j]);
      }
    }
  }
  return out;
}

std::optional<double> jaccard_n(std::span<const PairSet> runs) {
  if (runs.empty()) throw EmptyInput("jaccard_n needs at least one run");
  PairSet unite;
  for (const auto& run : runs) unite.insert(run.begin(), run.end());
  if (unite.empty()) return std::nullopt;
  std::size_t common = 0;
  for (const auto& pair : runs.front()) {
    bool everywhere = std::all_of(runs.begin() + 1, runs.end(),
                                  [&](const PairSet& run) { return run.count(pair) != 0; });
    if (everywhere) ++common;
  }
  return static_cast<double>(common) / static_cast<double>(unite.size());
}

std::set<std::string> shared_ecs(const Matching& m, const std::string& tree_a,
                                 const std::string& tree_b) {
  m.tree(tree_a);
  m.tree(tree_b);
  std::set<std::string> out;
  for (const auto& ec : m.classes()) {
    bool has_a = false;
    bool has_b = false;
    for (const auto& atom : ec.members) {
      has_a = has_a || atom.tree_id == tree_a;
      has_b = has_b || atom.tree_id == tree_b;
    }
    if (has_a && has_b) out.insert(ec.ec_id);
  }
  return out;
}

}  // namespace lexdiff
