#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lexdiff/ec_graph.hpp"
#include "lexdiff/edgecase.hpp"
#include "lexdiff/formal_model.hpp"
#include "lexdiff/gateway.hpp"
#include "lexdiff/interface.hpp"
#include "lexdiff/metrics.hpp"
#include "lexdiff/triage.hpp"

namespace lexdiff {

/// Process exit codes shared by every command.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitPartial = 2,    // resource limit hit or some pairs failed
  kExitTransport = 3,  // transport or configuration problem
};

/// Directory layout:
///   <root>/provisions/<id>/formalizations/*.json   (input)
///   <root>/provisions/<id>/matchings/*.json        (input)
///   <root>/provisions/<id>/provision.txt           (input, optional)
///   <root>/provisions/<id>/covers/                 (output)
///   <root>/provisions/<id>/reports/                (output)
class Workspace {
 public:
  explicit Workspace(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path provision_dir(const std::string& id) const;
  std::filesystem::path formalizations_dir(const std::string& id) const;
  std::filesystem::path matchings_dir(const std::string& id) const;
  std::filesystem::path covers_dir(const std::string& id) const;
  std::filesystem::path reports_dir(const std::string& id) const;

  /// Provision ids, sorted.
  std::vector<std::string> provisions() const;
  /// Parsed formalizations sorted by tree id. Throws on the first bad file.
  std::vector<Formalization> load_formalizations(const std::string& id) const;
  /// The first matching file in name order.
  std::filesystem::path matching_file(const std::string& id) const;
  Matching load_matching(const std::string& id, std::span<const Formalization> trees) const;
  /// Empty when provision.txt is absent.
  std::string provision_text(const std::string& id) const;

 private:
  std::filesystem::path root_;
};

/// Cover file name for a pair; the suffix hashes everything the cover
/// depends on, so a stale cover is detected instead of reused.
std::string cover_file_name(const Interface& iface, const Formalization& a, const Formalization& b,
                            std::size_t cap);

struct AnalyzeOptions {
  double coverage_threshold = kDefaultCoverageThreshold;
  std::size_t cap = kDefaultPiCap;
  std::size_t jobs = 1;
  SolverLimits limits;
};

struct VerbalizeOptions {
  std::optional<std::filesystem::path> config_path;
  bool offline = false;
  /// Replaces the HTTP transport, e.g. with a replayed transcript.
  std::shared_ptr<Transport> transport;
  TriageOptions triage;
};

struct ConsistencyReport {
  std::size_t runs = 0;
  std::vector<std::pair<std::string, std::string>> invalid;  // file, reason
  std::vector<std::string> valid;                            // file names
  std::optional<double> jaccard;                             // nullopt: undefined
};

/// Checks formalization and matching documents; directories are searched
/// recursively for *.json. Matchings are checked against the formalizations
/// in a sibling formalizations/ directory when there is one.
int cmd_validate(std::span<const std::filesystem::path> paths, std::ostream& out, std::ostream& err);

/// Interfaces, equivalence and covers for every unordered pair of trees.
int cmd_analyze(const Workspace& ws, const std::string& provision, const AnalyzeOptions& options,
                std::ostream& out, std::ostream& err);

/// Representative edge cases from the covers written by cmd_analyze.
int cmd_triage(const Workspace& ws, const std::string& provision, const TriageOptions& options,
               std::ostream& out, std::ostream& err);

ConsistencyReport consistency(const std::filesystem::path& runs_dir,
                              std::span<const Formalization> formalizations);
/// Agreement of repeated matching runs; formalizations default to the
/// runs directory's sibling formalizations/.
int cmd_consistency(const std::filesystem::path& runs_dir,
                    const std::optional<std::filesystem::path>& formalizations_dir, std::ostream& out,
                    std::ostream& err);

/// Scenario text for every representative, written to
/// reports/verbalizations.json. Refuses in offline mode.
int cmd_verbalize(const Workspace& ws, const std::string& provision, const VerbalizeOptions& options,
                  std::ostream& out, std::ostream& err);

/// Concatenates pair records of the given provisions (all when empty) into
/// <root>/reports/ and prints coverage buckets.
int cmd_report(const Workspace& ws, std::span<const std::string> provisions, std::ostream& out,
               std::ostream& err);

}  // namespace lexdiff
