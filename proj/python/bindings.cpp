#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "lexdiff/ec_graph.hpp"
#include "lexdiff/edgecase.hpp"
#include "lexdiff/errors.hpp"
#include "lexdiff/formal_model.hpp"
#include "lexdiff/interface.hpp"
#include "lexdiff/metrics.hpp"
#include "lexdiff/triage.hpp"

namespace py = pybind11;
using json = nlohmann::json;
using namespace lexdiff;

namespace {

std::vector<Formalization> parse_all(const std::vector<std::string>& docs) {
  std::vector<Formalization> trees;
  trees.reserve(docs.size());
  for (const auto& d : docs) trees.push_back(parse_formalization(d));
  return trees;
}

// Violations of one document; empty when it is a valid tree.
std::vector<std::string> check_formalization(const std::string& text) {
  try {
    parse_formalization(text);
    return {};
  } catch (const StructureError& e) {
    return e.violations();
  }
}

std::string analyze_pair(const std::vector<std::string>& formalizations, const std::string& matching,
                         const std::string& tree_a, const std::string& tree_b, std::size_t cap) {
  auto trees = parse_all(formalizations);
  auto m = parse_matching(matching, trees);
  auto iface = compute_interface(m, tree_a, tree_b);
  auto fa = compile(m.tree(tree_a), iface);
  auto fb = compile(m.tree(tree_b), iface);
  std::vector<Interface> one{iface};
  json out{{"interface", json::parse(serialize_interfaces(one)).at(0)}};
  py::gil_scoped_release unlocked;
  out["equivalent"] = equivalent(fa, fb);
  out["cover"] = json::parse(serialize_cover(enumerate_cover(fa, fb, cap, {m.provision_id(), tree_a, tree_b})));
  return out.dump();
}

std::string representatives(const std::vector<std::string>& formalizations, const std::string& matching,
                            std::size_t cap, double coverage_threshold, std::size_t pi_cap) {
  auto trees = parse_all(formalizations);
  auto m = parse_matching(matching, trees);
  py::gil_scoped_release unlocked;
  std::vector<PairAnalysis> pairs;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    for (std::size_t j = i + 1; j < trees.size(); ++j) {
      auto iface = compute_interface(m, trees[i].tree_id, trees[j].tree_id);
      auto cover = enumerate_cover(compile(trees[i], iface), compile(trees[j], iface), pi_cap,
                                   {m.provision_id(), trees[i].tree_id, trees[j].tree_id});
      pairs.push_back({std::move(iface), std::move(cover)});
    }
  }
  TriageOptions options;
  options.cap = cap;
  options.coverage_threshold = coverage_threshold;
  return serialize_representatives(m, select_representatives(m, pairs, options));
}

std::optional<double> jaccard(const std::vector<std::string>& matchings, const std::vector<std::string>& formalizations) {
  auto trees = parse_all(formalizations);
  std::vector<PairSet> runs;
  for (const auto& doc : matchings) runs.push_back(co_membership(parse_matching(doc, trees)));
  return jaccard_n(runs);
}

}  // namespace

PYBIND11_MODULE(_lexdiff, m) {
  m.doc() = "Semantic comparison of legal-provision formalizations";

  static py::exception<Error> error(m, "LexdiffError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (e.kind() + ": " + e.what()).c_str());
    }
  });

  m.def("check_formalization", &check_formalization, py::arg("document"),
        "Structural violations of a formalization document, as `Rule(node)` strings.");
  m.def("analyze_pair", &analyze_pair, py::arg("formalizations"), py::arg("matching"), py::arg("tree_a"),
        py::arg("tree_b"), py::arg("cap") = kDefaultPiCap,
        "Interface, equivalence and edge-case cover of one pair, as a JSON string.");
  m.def("representatives", &representatives, py::arg("formalizations"), py::arg("matching"),
        py::arg("cap") = kDefaultRepresentativeCap, py::arg("coverage_threshold") = kDefaultCoverageThreshold,
        py::arg("pi_cap") = kDefaultPiCap, "Representative edge cases of a provision, as a JSON string.");
  m.def("jaccard", &jaccard, py::arg("matchings"), py::arg("formalizations"));
  m.def("spearman", [](const std::vector<double>& xs, const std::vector<double>& ys) { return spearman_rho(xs, ys); },
        py::arg("xs"), py::arg("ys"));
}
