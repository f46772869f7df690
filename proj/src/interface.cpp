#include "lexdiff/interface.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "lexdiff/errors.hpp"
#include "support.hpp"

namespace lexdiff {

using detail::json;

namespace {

/// Parent links and subtree queries for one tree.
class TreeIndex {
 public:
  explicit TreeIndex(const Formalization& f) : f_(f) {
    for (const auto& [id, node] : f.nodes) {
      for (const auto& child : node.children) parent_[child] = id;
    }
  }

  bool strict_ancestor(const std::string& ancestor, const std::string& node) const {
    for (auto it = parent_.find(node); it != parent_.end(); it = parent_.find(it->second)) {
      if (it->second == ancestor) return true;
    }
    return false;
  }

  template <typename Pred>
  bool any_strict_descendant(const std::string& node, Pred pred) const {
    std::vector<std::string> stack(f_.node(node).children);
    while (!stack.empty()) {
      auto id = std::move(stack.back());
      stack.pop_back();
      if (pred(id)) return true;
      const auto& children = f_.node(id).children;
      stack.insert(stack.end(), children.begin(), children.end());
    }
    return false;
  }

 private:
  const Formalization& f_;
  std::map<std::string, std::string> parent_;
};

std::vector<std::string> private_roots(const Formalization& f,
                                       const std::map<std::string, std::string>& cut) {
  std::map<std::string, bool> holds;
  std::function<bool(const std::string&)> scan = [&](const std::string& id) {
    bool h = cut.count(id) != 0;
    for (const auto& child : f.node(id).children) h = scan(child) || h;
    holds[id] = h;
    return h;
  };
  scan(f.root);
  std::vector<std::string> out;
  std::function<void(const std::string&)> walk = [&](const std::string& id) {
    if (!holds[id]) {
      out.push_back(id);
      return;
    }
    if (cut.count(id)) return;
    for (const auto& child : f.node(id).children) walk(child);
  };
  walk(f.root);
  return out;
}

double coverage(const Formalization& f, const TreeIndex& index,
                const std::map<std::string, std::string>& cut) {
  std::size_t on_or_above = 0;
  for (const auto& [id, node] : f.nodes) {
    if (cut.count(id)) {
      ++on_or_above;
      continue;
    }
    bool ancestor = std::any_of(cut.begin(), cut.end(), [&](const auto& entry) {
      return index.strict_ancestor(id, entry.first);
    });
    if (ancestor) ++on_or_above;
  }
  return static_cast<double>(on_or_above) / static_cast<double>(f.nodes.size());
}

const std::map<std::string, std::string>& cut_map(const Interface& iface, const std::string& tree_id) {
  static const std::map<std::string, std::string> kEmpty;
  auto it = iface.cut_nodes.find(tree_id);
  return it == iface.cut_nodes.end() ? kEmpty : it->second;
}

}  // namespace

bool Interface::is_cut(const std::string& ec_id) const {
  return std::binary_search(cut_ecs.begin(), cut_ecs.end(), ec_id);
}

const PrivateVar* Interface::private_var(const std::string& tree_id, const std::string& node_id) const {
  for (const auto& pv : private_vars) {
    if (pv.tree_id == tree_id && pv.node_id == node_id) return &pv;
  }
  return nullptr;
}

std::vector<std::string> Interface::input_variables() const {
  std::vector<std::string> out = cut_ecs;
  for (const auto& pv : private_vars) out.push_back(pv.id);
  std::sort(out.begin(), out.end());
  return out;
}

Interface compute_interface(const Matching& m, const std::string& tree_a, const std::string& tree_b) {
  const Formalization& fa = m.tree(tree_a);
  const Formalization& fb = m.tree(tree_b);
  if (tree_a == tree_b) throw SchemaError("interface needs two distinct trees");

  Interface iface;
  iface.tree_a = tree_a;
  iface.tree_b = tree_b;
  auto shared = shared_ecs(m, tree_a, tree_b);
  iface.shared_ecs.assign(shared.begin(), shared.end());
  iface.no_shared = shared.empty();

  const Formalization* trees[2] = {&fa, &fb};
  const TreeIndex index_a(fa);
  const TreeIndex index_b(fb);
  const TreeIndex* indexes[2] = {&index_a, &index_b};
  auto node_of = [&](int side, const std::string& ec) { return *m.node_in(ec, trees[side]->tree_id); };

  // Deepest shared ECs per tree.
  std::set<std::string> candidates;
  for (int side = 0; side < 2; ++side) {
    const auto& tree_id = trees[side]->tree_id;
    for (const auto& ec : shared) {
      bool deeper = indexes[side]->any_strict_descendant(node_of(side, ec), [&](const std::string& id) {
        return shared.count(m.ec_of(tree_id, id)) != 0;
      });
      if (!deeper) candidates.insert(ec);
    }
  }

  // Drop every candidate that sits strictly below another candidate in either
  // tree. The lifted EC relation is acyclic, so the survivors are exactly the
  // undominated candidates and form an antichain in both trees.
  for (const auto& d : candidates) {
    bool dominated = std::any_of(candidates.begin(), candidates.end(), [&](const std::string& e) {
      if (e == d) return false;
      for (int side = 0; side < 2; ++side) {
        if (indexes[side]->strict_ancestor(node_of(side, e), node_of(side, d))) return true;
      }
      return false;
    });
    if (!dominated) iface.cut_ecs.push_back(d);
  }

  for (int side = 0; side < 2; ++side) {
    auto& cut = iface.cut_nodes[trees[side]->tree_id];
    for (const auto& ec : iface.cut_ecs) cut[node_of(side, ec)] = ec;
  }

  std::set<std::string> taken(iface.cut_ecs.begin(), iface.cut_ecs.end());
  for (const auto& ec : m.classes()) taken.insert(ec.ec_id);
  for (int side = 0; side < 2; ++side) {
    const auto& tree_id = trees[side]->tree_id;
    for (const auto& node_id : private_roots(*trees[side], iface.cut_nodes[tree_id])) {
      std::string id = "~" + tree_id + "/" + node_id;
      for (int k = 2; taken.count(id); ++k) id = "~" + tree_id + "/" + node_id + "#" + std::to_string(k);
      taken.insert(id);
      iface.private_vars.push_back({id, tree_id, node_id});
    }
  }
  std::sort(iface.private_vars.begin(), iface.private_vars.end(),
            [](const PrivateVar& a, const PrivateVar& b) { return a.id < b.id; });

  iface.cov_a = coverage(fa, index_a, iface.cut_nodes[tree_a]);
  iface.cov_b = coverage(fb, index_b, iface.cut_nodes[tree_b]);
  iface.cov_pair = (iface.cov_a == 0.0 || iface.cov_b == 0.0) ? 0.0 : std::sqrt(iface.cov_a * iface.cov_b);
  return iface;
}

namespace {

// Nodes whose subtree (inclusive) holds a cut node.
std::set<std::string> cut_holders(const Formalization& f, const std::map<std::string, std::string>& cut) {
  std::set<std::string> out;
  std::function<bool(const std::string&)> scan = [&](const std::string& id) {
    bool h = cut.count(id) != 0;
    for (const auto& child : f.node(id).children) h = scan(child) || h;
    if (h) out.insert(id);
    return h;
  };
  scan(f.root);
  return out;
}

void check_side(const Formalization& f, const Interface& iface) {
  if (f.tree_id != iface.tree_a && f.tree_id != iface.tree_b) {
    throw UnknownTree("tree '" + f.tree_id + "' is not part of interface " + iface.tree_a + "/" +
                      iface.tree_b);
  }
}

BoolExpr translate(const Formalization& f, const Interface& iface,
                   const std::map<std::string, std::string>& cut, const std::set<std::string>& holders,
                   const std::string& id) {
  if (auto it = cut.find(id); it != cut.end()) return BoolExpr::variable(it->second);
  if (!holders.count(id)) {
    const PrivateVar* pv = iface.private_var(f.tree_id, id);
    if (!pv) throw InternalError("node '" + id + "' of '" + f.tree_id + "' is neither above, at, nor abstracted below the cut");
    return BoolExpr::variable(pv->id);
  }
  const Node& node = f.node(id);
  if (!node.op) throw InternalError("node '" + id + "' lies above the cut but has no operator");
  std::vector<BoolExpr> operands;
  operands.reserve(node.children.size());
  for (const auto& child : node.children) operands.push_back(translate(f, iface, cut, holders, child));
  return BoolExpr::apply(*node.op, std::move(operands));
}

}  // namespace

Placement placement(const Formalization& f, const Interface& iface, const std::string& node_id) {
  check_side(f, iface);
  const auto& cut = cut_map(iface, f.tree_id);
  if (cut.count(node_id)) return Placement::AtCut;
  auto holders = cut_holders(f, cut);
  if (holders.count(node_id)) return Placement::AboveCut;
  if (iface.private_var(f.tree_id, node_id)) return Placement::PrivateRoot;
  f.node(node_id);
  return Placement::Abstracted;
}

BoolExpr compile(const Formalization& f, const Interface& iface) {
  check_side(f, iface);
  const auto& cut = cut_map(iface, f.tree_id);
  return translate(f, iface, cut, cut_holders(f, cut), f.root);
}

std::optional<BoolExpr> compile_at(const Formalization& f, const Interface& iface,
                                   const std::string& node_id) {
  if (placement(f, iface, node_id) == Placement::Abstracted) return std::nullopt;
  const auto& cut = cut_map(iface, f.tree_id);
  return translate(f, iface, cut, cut_holders(f, cut), node_id);
}

std::string serialize_interfaces(std::span<const Interface> interfaces) {
  json rows = json::array();
  for (const auto& iface : interfaces) {
    json privates = json::array();
    for (const auto& pv : iface.private_vars) {
      privates.push_back({{"id", pv.id}, {"tree_id", pv.tree_id}, {"node_id", pv.node_id}});
    }
    rows.push_back({{"pair", {iface.tree_a, iface.tree_b}},
                    {"cut_ecs", iface.cut_ecs},
                    {"private_vars", std::move(privates)},
                    {"cov_a", iface.cov_a},
                    {"cov_b", iface.cov_b},
                    {"cov_pair", iface.cov_pair},
                    {"no_shared", iface.no_shared}});
  }
  return rows.dump(2) + "\n";
}

}  // namespace lexdiff
