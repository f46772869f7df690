// lexdiff: compare Boolean formalizations of legal provisions.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lexdiff/errors.hpp"
#include "lexdiff/workspace.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Compare Boolean formalizations of legal provisions and triage their edge cases"};
  app.require_subcommand(1);

  std::string root = ".";
  app.add_option("-w,--workspace", root, "Workspace root")->capture_default_str();

  lexdiff::AnalyzeOptions analyze;
  lexdiff::TriageOptions triage;
  lexdiff::VerbalizeOptions verbalize;
  std::string provision;
  std::vector<std::string> provisions;
  std::vector<std::string> paths;
  std::string runs_dir;
  std::string formalizations_dir;
  std::string config;
  std::string replay;

  auto* validate_cmd = app.add_subcommand("validate", "Check formalization and matching documents");
  validate_cmd->add_option("paths", paths, "Files or directories")->required();

  auto* analyze_cmd = app.add_subcommand("analyze", "Interfaces, equivalence and edge-case covers for all pairs");
  analyze_cmd->add_option("provision", provision, "Provision id")->required();
  analyze_cmd->add_option("--coverage-threshold", analyze.coverage_threshold, "Coverage reported as high")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  analyze_cmd->add_option("--cap", analyze.cap, "Prime implicants per pair")->check(CLI::PositiveNumber)
      ->capture_default_str();
  analyze_cmd->add_option("--jobs", analyze.jobs, "Pairs analyzed in parallel")->check(CLI::PositiveNumber)
      ->capture_default_str();
  analyze_cmd->add_option("--max-seconds", analyze.limits.max_seconds, "Solver time budget per call");

  auto add_triage_flags = [&](CLI::App* cmd) {
    cmd->add_option("--rep-cap,--cap", triage.cap, "Representatives per provision")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--coverage-threshold", triage.coverage_threshold, "Pairs below are not triaged")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  };
  auto* triage_cmd = app.add_subcommand("triage", "Pick representative edge cases from the covers");
  triage_cmd->add_option("provision", provision, "Provision id")->required();
  add_triage_flags(triage_cmd);

  auto* consistency_cmd = app.add_subcommand("consistency", "Agreement of repeated matching runs");
  consistency_cmd->add_option("runs", runs_dir, "Directory of matching files")->required();
  consistency_cmd->add_option("--formalizations", formalizations_dir,
                              "Formalizations (default: sibling formalizations/)");

  auto* verbalize_cmd = app.add_subcommand("verbalize", "Scenario text for each representative via the gateway");
  verbalize_cmd->add_option("provision", provision, "Provision id")->required();
  verbalize_cmd->add_option("--config", config, "Gateway config (JSON)");
  verbalize_cmd->add_flag("--offline", verbalize.offline, "Refuse network access");
  verbalize_cmd->add_option("--replay", replay, "Answer from a recorded transcript instead of the network");
  add_triage_flags(verbalize_cmd);

  auto* report_cmd = app.add_subcommand("report", "Aggregate pair records across provisions");
  report_cmd->add_option("provisions", provisions, "Provision ids (default: all)");

  CLI11_PARSE(app, argc, argv);

  const lexdiff::Workspace ws{fs::path(root)};
  try {
    if (*validate_cmd) {
      std::vector<fs::path> p(paths.begin(), paths.end());
      return lexdiff::cmd_validate(p, std::cout, std::cerr);
    }
    if (*analyze_cmd) return lexdiff::cmd_analyze(ws, provision, analyze, std::cout, std::cerr);
    if (*triage_cmd) return lexdiff::cmd_triage(ws, provision, triage, std::cout, std::cerr);
    if (*consistency_cmd) {
      std::optional<fs::path> trees;
      if (!formalizations_dir.empty()) trees = formalizations_dir;
      return lexdiff::cmd_consistency(runs_dir, trees, std::cout, std::cerr);
    }
    if (*verbalize_cmd) {
      if (!config.empty()) verbalize.config_path = config;
      verbalize.triage = triage;
      if (!replay.empty()) {
        std::ifstream in(replay, std::ios::binary);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        verbalize.transport =
            std::make_shared<lexdiff::ReplayTransport>(lexdiff::ReplayTransport::from_transcript(text));
      }
      return lexdiff::cmd_verbalize(ws, provision, verbalize, std::cout, std::cerr);
    }
    if (*report_cmd) return lexdiff::cmd_report(ws, provisions, std::cout, std::cerr);
  } catch (const lexdiff::Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    return lexdiff::kExitValidation;
  }
  return lexdiff::kExitOk;
}
