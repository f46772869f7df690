#include "lexdiff/formal_model.hpp"

#include <algorithm>
#include <functional>

#include "lexdiff/errors.hpp"
#include "support.hpp"

namespace lexdiff {

using detail::json;

std::string_view to_string(Operator op) {
  switch (op) {
    case Operator::And: return "AND";
    case Operator::Or: return "OR";
    case Operator::Nand: return "NAND";
    case Operator::Nor: return "NOR";
  }
  return "?";
}

Operator parse_operator(std::string_view token) {
  if (token == "AND") return Operator::And;
  if (token == "OR") return Operator::Or;
  if (token == "NAND") return Operator::Nand;
  if (token == "NOR") return Operator::Nor;
  throw SchemaError("unknown operator '" + std::string(token) + "'");
}

Operator base_operator(Operator op) {
  switch (op) {
    case Operator::Nand: return Operator::And;
    case Operator::Nor: return Operator::Or;
    default: return op;
  }
}

bool is_negated(Operator op) { return op == Operator::Nand || op == Operator::Nor; }

const Node& Formalization::node(const std::string& id) const {
  auto it = nodes.find(id);
  if (it == nodes.end()) throw SchemaError("tree '" + tree_id + "' has no node '" + id + "'");
  return it->second;
}

std::string_view to_string(ViolationRule rule) {
  switch (rule) {
    case ViolationRule::EmptyTree: return "EmptyTree";
    case ViolationRule::MissingRoot: return "MissingRoot";
    case ViolationRule::RootHasParent: return "RootHasParent";
    case ViolationRule::EmptyLabel: return "EmptyLabel";
    case ViolationRule::IdMismatch: return "IdMismatch";
    case ViolationRule::DuplicateId: return "DuplicateId";
    case ViolationRule::MissingOperator: return "MissingOperator";
    case ViolationRule::LeafWithOperator: return "LeafWithOperator";
    case ViolationRule::UnknownChild: return "UnknownChild";
    case ViolationRule::DuplicateChild: return "DuplicateChild";
    case ViolationRule::MultipleParents: return "MultipleParents";
    case ViolationRule::Cycle: return "Cycle";
    case ViolationRule::Unreachable: return "Unreachable";
  }
  return "?";
}

std::string Violation::to_string() const {
  return std::string(lexdiff::to_string(rule)) + "(" + node_id + ")";
}

std::vector<Violation> validate(const Formalization& f) {
  std::vector<Violation> out;
  if (f.nodes.empty()) {
    out.push_back({ViolationRule::EmptyTree, f.tree_id});
    return out;
  }
  if (!f.contains(f.root)) out.push_back({ViolationRule::MissingRoot, f.root});

  std::map<std::string, int> parent_count;
  for (const auto& [id, node] : f.nodes) {
    if (node.id != id) out.push_back({ViolationRule::IdMismatch, id});
    if (node.label.empty()) out.push_back({ViolationRule::EmptyLabel, id});
    if (!node.children.empty() && !node.op) out.push_back({ViolationRule::MissingOperator, id});
    if (node.children.empty() && node.op) out.push_back({ViolationRule::LeafWithOperator, id});
    std::set<std::string> seen;
    for (const auto& child : node.children) {
      if (!seen.insert(child).second) {
        out.push_back({ViolationRule::DuplicateChild, child});
        continue;
      }
      if (!f.contains(child)) {
        out.push_back({ViolationRule::UnknownChild, child});
        continue;
      }
      ++parent_count[child];
    }
  }
  for (const auto& [child, count] : parent_count) {
    if (child == f.root) out.push_back({ViolationRule::RootHasParent, child});
    if (count > 1) out.push_back({ViolationRule::MultipleParents, child});
  }

  // Cycle detection over the whole child relation (colors: 0 new, 1 open, 2 done).
  std::map<std::string, int> color;
  std::function<void(const std::string&)> visit = [&](const std::string& id) {
    color[id] = 1;
    for (const auto& child : f.nodes.at(id).children) {
      if (!f.contains(child)) continue;
      int c = color[child];
      if (c == 1) {
        out.push_back({ViolationRule::Cycle, child});
      } else if (c == 0) {
        visit(child);
      }
    }
    color[id] = 2;
  };
  for (const auto& [id, node] : f.nodes) {
    if (color[id] == 0) visit(id);
  }

  std::set<std::string> reached;
  if (f.contains(f.root)) {
    std::vector<std::string> stack{f.root};
    while (!stack.empty()) {
      auto id = std::move(stack.back());
      stack.pop_back();
      if (!reached.insert(id).second) continue;
      for (const auto& child : f.nodes.at(id).children) {
        if (f.contains(child)) stack.push_back(child);
      }
    }
  }
  for (const auto& [id, node] : f.nodes) {
    if (!reached.count(id)) out.push_back({ViolationRule::Unreachable, id});
  }

  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.node_id, a.rule) < std::tie(b.node_id, b.rule);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where + ": missing field '" + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const auto& value = require(obj, key, where);
  if (!value.is_string()) throw SchemaError(where + ": field '" + key + "' must be a string");
  return value.get<std::string>();
}

}  // namespace

Formalization parse_formalization(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("formalization: invalid JSON: ") + e.what());
  }
  if (auto dup = detail::first_duplicate_key(text)) {
    const std::string prefix = "/nodes/";
    if (dup->rfind(prefix, 0) == 0 && dup->find('/', prefix.size()) == std::string::npos) {
      throw StructureError({Violation{ViolationRule::DuplicateId, dup->substr(prefix.size())}.to_string()});
    }
    throw SchemaError("formalization: duplicate key at " + *dup);
  }
  if (!doc.is_object()) throw SchemaError("formalization: document must be an object");

  Formalization f;
  f.tree_id = require_string(doc, "tree_id", "formalization");
  f.provision_id = require_string(doc, "provision_id", "formalization");
  f.root = require_string(doc, "root", "formalization");
  const auto& nodes = require(doc, "nodes", "formalization");
  if (!nodes.is_object()) throw SchemaError("formalization: 'nodes' must be an object");

  for (const auto& [id, body] : nodes.items()) {
    const std::string where = "node '" + id + "'";
    if (!body.is_object()) throw SchemaError(where + ": must be an object");
    Node node;
    node.id = id;
    node.label = require_string(body, "label", where);
    if (auto it = body.find("operator"); it != body.end() && !it->is_null()) {
      if (!it->is_string()) throw SchemaError(where + ": 'operator' must be a string or null");
      node.op = parse_operator(it->get<std::string>());
    }
    if (auto it = body.find("children"); it != body.end() && !it->is_null()) {
      if (!it->is_array()) throw SchemaError(where + ": 'children' must be an array");
      for (const auto& child : *it) {
        if (!child.is_string()) throw SchemaError(where + ": child ids must be strings");
        node.children.push_back(child.get<std::string>());
      }
    }
    f.nodes.emplace(id, std::move(node));
  }

  auto violations = validate(f);
  if (!violations.empty()) {
    std::vector<std::string> messages;
    messages.reserve(violations.size());
    for (const auto& v : violations) messages.push_back(v.to_string());
    throw StructureError(std::move(messages));
  }
  return f;
}

std::string serialize(const Formalization& f) {
  json nodes = json::object();
  for (const auto& [id, node] : f.nodes) {
    json body;
    body["label"] = node.label;
    body["operator"] = node.op ? json(std::string(to_string(*node.op))) : json(nullptr);
    body["children"] = node.children;
    nodes[id] = std::move(body);
  }
  json doc;
  doc["tree_id"] = f.tree_id;
  doc["provision_id"] = f.provision_id;
  doc["root"] = f.root;
  doc["nodes"] = std::move(nodes);
  return doc.dump(2) + "\n";
}

std::set<std::string> leaves(const Formalization& f) {
  std::set<std::string> out;
  for (const auto& [id, node] : f.nodes) {
    if (node.is_leaf()) out.insert(id);
  }
  return out;
}

std::set<std::string> internal_nodes(const Formalization& f) {
  std::set<std::string> out;
  for (const auto& [id, node] : f.nodes) {
    if (!node.is_leaf()) out.insert(id);
  }
  return out;
}

}  // namespace lexdiff
