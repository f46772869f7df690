#include "lexdiff/triage.hpp"

#include <algorithm>

#include "lexdiff/errors.hpp"
#include "support.hpp"

namespace lexdiff {

using detail::json;

namespace {

json shape_json(const SideShape& s) {
  return json::array({s.base ? json(std::string(to_string(*s.base))) : json("LEAF"), s.negated, s.child_ecs});
}

std::vector<Literal> literals_of(const PrimeImplicant& pi) {
  std::vector<Literal> out;
  out.reserve(pi.fixed.size());
  for (const auto& [var, value] : pi.fixed) out.push_back({var, value});
  return out;
}

}  // namespace

std::string Signature::canonical() const {
  json items = json::array();
  for (const auto& e : entries) {
    items.push_back({{"ec", e.ec_id}, {"true", shape_json(e.true_side)}, {"false", shape_json(e.false_side)}});
  }
  return json{{"mixed", mixed}, {"entries", std::move(items)}}.dump();
}

std::string Signature::digest() const { return detail::hex64(detail::fnv1a(canonical())); }

struct RootCauseAnalyzer::State {
  struct Candidate {
    std::string ec_id;
    std::string node_a;
    std::string node_b;
    Literal guard;
    Literal lit_a;
  };

  State(const Matching& matching, const Interface& interface, SolverLimits limits)
      : m(matching),
        iface(interface),
        tree_a(m.tree(interface.tree_a)),
        tree_b(m.tree(interface.tree_b)),
        builder([&] {
          auto vars = interface.input_variables();
          return std::set<std::string>(vars.begin(), vars.end());
        }()) {
    solver.set_limits(limits);
    root_a = builder.encode(compile(tree_a, iface));
    root_b = builder.encode(compile(tree_b, iface));
    for (const auto& ec : iface.shared_ecs) {
      auto node_a = *m.node_in(ec, tree_a.tree_id);
      auto node_b = *m.node_in(ec, tree_b.tree_id);
      auto ga = placement(tree_a, iface, node_a);
      auto gb = placement(tree_b, iface, node_b);
      auto on_or_above = [](Placement p) { return p == Placement::AboveCut || p == Placement::AtCut; };
      if (!on_or_above(ga) || !on_or_above(gb)) continue;
      Literal la = builder.encode(*compile_at(tree_a, iface, node_a));
      Literal lb = builder.encode(*compile_at(tree_b, iface, node_b));
      Literal guard = builder.fresh();
      builder.add_clause({~guard, ~la, lb});
      builder.add_clause({~guard, la, ~lb});
      index.emplace(ec, candidates.size());
      candidates.push_back({ec, node_a, node_b, guard, la});
      ids.push_back(ec);
    }
    for (const auto& var : builder.formula().auxiliaries()) solver.mark_auxiliary(var);
    auto clauses = builder.take_new_clauses();
    solver.add_clauses(clauses);
  }

  bool unsat_with(std::vector<Literal> assumptions, const Literal& extra) {
    assumptions.push_back(extra);
    return !solver.solve(assumptions).sat;
  }

  const Matching& m;
  Interface iface;
  const Formalization& tree_a;
  const Formalization& tree_b;
  CnfBuilder builder;
  Solver solver;
  Literal root_a;
  Literal root_b;
  std::vector<Candidate> candidates;
  std::vector<std::string> ids;
  std::map<std::string, std::size_t> index;
};

RootCauseAnalyzer::RootCauseAnalyzer(const Matching& m, const Interface& iface, SolverLimits limits)
    : state_(std::make_unique<State>(m, iface, limits)) {}
RootCauseAnalyzer::~RootCauseAnalyzer() = default;
RootCauseAnalyzer::RootCauseAnalyzer(RootCauseAnalyzer&&) noexcept = default;
RootCauseAnalyzer& RootCauseAnalyzer::operator=(RootCauseAnalyzer&&) noexcept = default;

const std::vector<std::string>& RootCauseAnalyzer::candidates() const { return state_->ids; }

bool RootCauseAnalyzer::forced_apart(const PrimeImplicant& pi, const std::string& ec_id) {
  auto it = state_->index.find(ec_id);
  if (it == state_->index.end()) return false;
  return state_->unsat_with(literals_of(pi), state_->candidates[it->second].guard);
}

std::vector<RootCause> RootCauseAnalyzer::root_causes(const PrimeImplicant& pi) {
  auto& s = *state_;
  const auto assumptions = literals_of(pi);
  std::vector<bool> forced(s.candidates.size());
  for (std::size_t i = 0; i < s.candidates.size(); ++i) {
    forced[i] = s.unsat_with(assumptions, s.candidates[i].guard);
  }

  auto child_forced = [&](const Formalization& tree, const std::string& node_id) {
    for (const auto& child : tree.node(node_id).children) {
      auto it = s.index.find(s.m.ec_of(tree.tree_id, child));
      if (it != s.index.end() && forced[it->second]) return true;
    }
    return false;
  };

  std::vector<RootCause> out;
  for (std::size_t i = 0; i < s.candidates.size(); ++i) {
    if (!forced[i]) continue;
    const auto& c = s.candidates[i];
    if (child_forced(s.tree_a, c.node_a) || child_forced(s.tree_b, c.node_b)) continue;
    RootCause cause{c.ec_id, std::nullopt};
    if (s.unsat_with(assumptions, ~c.lit_a)) {
      cause.true_tree = s.tree_a.tree_id;
    } else if (s.unsat_with(assumptions, c.lit_a)) {
      cause.true_tree = s.tree_b.tree_id;
    }
    out.push_back(std::move(cause));
  }
  return out;
}

std::optional<std::string> RootCauseAnalyzer::concluding_tree(const PrimeImplicant& pi) {
  auto& s = *state_;
  const auto assumptions = literals_of(pi);
  if (s.unsat_with(assumptions, ~s.root_a)) return s.tree_a.tree_id;
  if (s.unsat_with(assumptions, ~s.root_b)) return s.tree_b.tree_id;
  return std::nullopt;
}

namespace {

SideShape shape_at(const Matching& m, const Formalization& tree, const std::string& node_id) {
  const Node& node = tree.node(node_id);
  SideShape shape;
  if (node.op) {
    shape.base = base_operator(*node.op);
    shape.negated = is_negated(*node.op);
  }
  for (const auto& child : node.children) shape.child_ecs.push_back(m.ec_of(tree.tree_id, child));
  std::sort(shape.child_ecs.begin(), shape.child_ecs.end());
  return shape;
}

bool strictly_below(const Formalization& tree, const std::string& node_id, const std::string& ancestor) {
  for (const auto& child : tree.node(ancestor).children) {
    if (child == node_id || strictly_below(tree, node_id, child)) return true;
  }
  return false;
}

}  // namespace

Signature RootCauseAnalyzer::signature(const PrimeImplicant& pi, const std::vector<RootCause>& causes) {
  auto& s = *state_;
  auto concluding = concluding_tree(pi);
  Signature sig;
  sig.mixed = !concluding;
  auto below = [&](const std::string& ec, const std::string& ancestor_ec) {
    for (const auto* tree : {&s.tree_a, &s.tree_b}) {
      auto n = s.m.node_in(ec, tree->tree_id);
      auto a = s.m.node_in(ancestor_ec, tree->tree_id);
      if (n && a && strictly_below(*tree, *n, *a)) return true;
    }
    return false;
  };
  for (const auto& cause : causes) {
    auto node_a = s.m.node_in(cause.ec_id, s.tree_a.tree_id);
    auto node_b = s.m.node_in(cause.ec_id, s.tree_b.tree_id);
    if (!node_a || !node_b) throw InternalError("root cause '" + cause.ec_id + "' is not shared by the pair");
    // Only the deepest root causes shape the signature.
    if (std::any_of(causes.begin(), causes.end(),
                    [&](const RootCause& other) { return below(other.ec_id, cause.ec_id); })) {
      continue;
    }
    SideShape a = shape_at(s.m, s.tree_a, *node_a);
    SideShape b = shape_at(s.m, s.tree_b, *node_b);
    SignatureEntry entry{cause.ec_id, {}, {}};
    if (concluding == s.tree_a.tree_id) {
      entry.true_side = std::move(a);
      entry.false_side = std::move(b);
    } else if (concluding == s.tree_b.tree_id) {
      entry.true_side = std::move(b);
      entry.false_side = std::move(a);
    } else {
      entry.true_side = std::min(a, b);
      entry.false_side = std::max(a, b);
    }
    sig.entries.push_back(std::move(entry));
  }
  std::sort(sig.entries.begin(), sig.entries.end(),
            [](const SignatureEntry& x, const SignatureEntry& y) { return x.ec_id < y.ec_id; });
  return sig;
}

std::vector<RootCause> root_causes(const PrimeImplicant& pi, const Interface& iface, const Matching& m) {
  RootCauseAnalyzer analyzer(m, iface);
  return analyzer.root_causes(pi);
}

Signature signature_of(const PrimeImplicant& pi, const std::vector<RootCause>& causes,
                       const Interface& iface, const Matching& m) {
  RootCauseAnalyzer analyzer(m, iface);
  return analyzer.signature(pi, causes);
}

std::string ec_label(const Matching& m, const std::string& ec_id) {
  const auto& ec = m.ec(ec_id);
  if (ec.label && !ec.label->empty()) return *ec.label;
  const auto& atom = ec.members.front();
  return m.tree(atom.tree_id).node(atom.node_id).label;
}

std::string variable_label(const Matching& m, const Interface& iface, const std::string& var) {
  for (const auto& pv : iface.private_vars) {
    if (pv.id == var) return m.tree(pv.tree_id).node(pv.node_id).label;
  }
  return ec_label(m, var);
}

namespace {

bool smaller(const Representative& x, const Representative& y) {
  if (x.pi.fixed.size() != y.pi.fixed.size()) return x.pi.fixed.size() < y.pi.fixed.size();
  if (x.pi.pair != y.pi.pair) return x.pi.pair < y.pi.pair;
  return x.pi.fixed < y.pi.fixed;
}

}  // namespace

std::vector<Representative> select_representatives(const Matching& m, std::span<const PairAnalysis> pairs,
                                                   const TriageOptions& options) {
  std::map<std::string, Representative> classes;  // keyed by canonical signature
  for (const auto& pa : pairs) {
    if (pa.iface.cov_pair < options.coverage_threshold) continue;
    if (pa.cover.pis.empty()) continue;
    const auto& ta = m.tree(pa.iface.tree_a);
    const auto& tb = m.tree(pa.iface.tree_b);
    if (ta.node(ta.root).op != tb.node(tb.root).op) continue;

    const PairId pair{m.provision_id(), pa.iface.tree_a, pa.iface.tree_b};
    std::map<std::string, std::string> labels;
    for (const auto& var : pa.iface.input_variables()) labels[var] = variable_label(m, pa.iface, var);

    RootCauseAnalyzer analyzer(m, pa.iface, options.limits);
    for (const auto& raw : pa.cover.pis) {
      Representative candidate;
      candidate.pi = raw;
      candidate.pi.pair = pair;
      candidate.root_causes = analyzer.root_causes(candidate.pi);
      candidate.signature = analyzer.signature(candidate.pi, candidate.root_causes);
      candidate.variable_labels = labels;
      candidate.class_size = 1;

      auto key = candidate.signature.canonical();
      auto it = classes.find(key);
      if (it == classes.end()) {
        classes.emplace(std::move(key), std::move(candidate));
      } else {
        std::size_t size = it->second.class_size + 1;
        if (smaller(candidate, it->second)) it->second = std::move(candidate);
        it->second.class_size = size;
      }
    }
  }

  std::vector<Representative> out;
  out.reserve(classes.size());
  for (auto& [key, rep] : classes) out.push_back(std::move(rep));
  std::sort(out.begin(), out.end(), smaller);
  if (out.size() > options.cap) out.resize(options.cap);
  return out;
}

std::string serialize_representatives(const Matching& m, std::span<const Representative> reps) {
  json rows = json::array();
  for (const auto& rep : reps) {
    json fixed = json::object();
    for (const auto& [var, value] : rep.pi.fixed) fixed[var] = value;
    json causes = json::array();
    for (const auto& cause : rep.root_causes) {
      causes.push_back({{"ec_id", cause.ec_id},
                        {"label", ec_label(m, cause.ec_id)},
                        {"true_tree", cause.true_tree ? json(*cause.true_tree) : json(nullptr)}});
    }
    rows.push_back({{"provision_id", rep.pi.pair.provision_id},
                    {"signature", rep.signature.digest()},
                    {"signature_detail", json::parse(rep.signature.canonical())},
                    {"pair", {rep.pi.pair.tree_a, rep.pi.pair.tree_b}},
                    {"fixed", std::move(fixed)},
                    {"variable_labels", rep.variable_labels},
                    {"root_causes", std::move(causes)},
                    {"class_size", rep.class_size}});
  }
  return rows.dump(2) + "\n";
}

}  // namespace lexdiff
