#include "lexdiff/workspace.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "lexdiff/errors.hpp"
#include "support.hpp"

namespace lexdiff {

namespace fs = std::filesystem;
using detail::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InternalError("cannot write " + path.string());
  out << content;
}

std::vector<fs::path> json_files(const fs::path& dir, bool recursive = false) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) return files;
  auto take = [&](const fs::directory_entry& entry) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  };
  if (recursive) {
    for (const auto& entry : fs::recursive_directory_iterator(dir)) take(entry);
  } else {
    for (const auto& entry : fs::directory_iterator(dir)) take(entry);
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string sanitize(std::string_view id) {
  std::string out;
  for (char c : id) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                      c == '_' || c == '.';
    out += keep ? c : '_';
  }
  return out;
}

std::string describe(const std::exception& e) {
  if (const auto* s = dynamic_cast<const StructureError*>(&e)) {
    std::string out = "structure violations:";
    for (const auto& v : s->violations()) out += " " + v;
    return out;
  }
  return e.what();
}

struct PairJob {
  std::string tree_a;
  std::string tree_b;
};

struct PairOutcome {
  PairRecord record;
  Interface iface;
  std::optional<std::string> cover_file;
  std::optional<std::string> cover_json;
  std::optional<std::string> error;
};

std::vector<PairJob> all_pairs(std::span<const Formalization> trees) {
  std::vector<PairJob> jobs;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    for (std::size_t j = i + 1; j < trees.size(); ++j) jobs.push_back({trees[i].tree_id, trees[j].tree_id});
  }
  return jobs;
}

PairOutcome analyze_pair(const Matching& m, const PairJob& job, const AnalyzeOptions& options) {
  PairOutcome out;
  out.record.provision_id = m.provision_id();
  out.record.tree_a = job.tree_a;
  out.record.tree_b = job.tree_b;
  try {
    const auto& a = m.tree(job.tree_a);
    const auto& b = m.tree(job.tree_b);
    out.iface = compute_interface(m, job.tree_a, job.tree_b);
    out.record.coverage = out.iface.cov_pair;
    auto fa = compile(a, out.iface);
    auto fb = compile(b, out.iface);
    if (equivalent(fa, fb, options.limits)) {
      out.record.equivalent = true;
      return out;
    }
    auto cover = enumerate_cover(fa, fb, options.cap, PairId{m.provision_id(), job.tree_a, job.tree_b},
                                 options.limits);
    out.record.pi_count = cover.pis.size();
    out.record.cap_hit = cover.cap_hit;
    out.cover_file = cover_file_name(out.iface, a, b, options.cap);
    out.cover_json = serialize_cover(cover);
  } catch (const Error& e) {
    out.error = std::string(e.kind()) + ": " + e.what();
  }
  return out;
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

struct LoadedProvision {
  std::vector<Formalization> trees;
  std::optional<Matching> matching;
};

// Loads trees and matching, printing what went wrong. Nullopt on failure.
std::optional<LoadedProvision> load_provision(const Workspace& ws, const std::string& provision,
                                              std::ostream& err) {
  LoadedProvision p;
  try {
    p.trees = ws.load_formalizations(provision);
    p.matching = ws.load_matching(provision, p.trees);
  } catch (const Error& e) {
    err << "error: " << provision << ": " << describe(e) << "\n";
    return std::nullopt;
  }
  for (const auto& w : p.matching->warnings()) err << "warning: " << provision << ": " << w << "\n";
  return p;
}

struct TriageInput {
  std::vector<PairAnalysis> pairs;
  std::size_t failed_pairs = 0;
};

// Rebuilds pair analyses from the cover index. Throws ConfigError with an
// actionable message when covers are missing or stale.
TriageInput load_covers(const Workspace& ws, const std::string& provision, const Matching& m) {
  const auto index_path = ws.covers_dir(provision) / "index.json";
  if (!fs::exists(index_path)) {
    throw ConfigError("no covers for provision '" + provision + "'; run `lexdiff analyze " + provision + "` first");
  }
  json index = detail::parse_strict(read_file(index_path), "cover index");
  const auto cap = index.at("cap").get<std::size_t>();

  std::set<std::pair<std::string, std::string>> indexed;
  TriageInput input;
  for (const auto& entry : index.at("pairs")) {
    const auto tree_a = entry.at("pair").at(0).get<std::string>();
    const auto tree_b = entry.at("pair").at(1).get<std::string>();
    indexed.emplace(tree_a, tree_b);
    if (!m.has_tree(tree_a) || !m.has_tree(tree_b)) {
      throw ConfigError("covers of '" + provision + "' are stale; rerun analyze");
    }
    if (entry.contains("error")) {
      ++input.failed_pairs;
      continue;
    }
    auto iface = compute_interface(m, tree_a, tree_b);
    if (entry.at("cover").is_null()) continue;  // equivalent pair
    const auto expected = cover_file_name(iface, m.tree(tree_a), m.tree(tree_b), cap);
    const auto file = entry.at("cover").get<std::string>();
    if (file != expected || !fs::exists(ws.covers_dir(provision) / file)) {
      throw ConfigError("covers of '" + provision + "' are stale or missing; rerun analyze");
    }
    auto cover = parse_cover(read_file(ws.covers_dir(provision) / file));
    input.pairs.push_back({std::move(iface), std::move(cover)});
  }
  for (auto it = m.trees().begin(); it != m.trees().end(); ++it) {
    for (auto jt = std::next(it); jt != m.trees().end(); ++jt) {
      if (!indexed.count({it->first, jt->first})) {
        throw ConfigError("covers of '" + provision + "' are stale; rerun analyze");
      }
    }
  }
  return input;
}

std::string validate_file(const fs::path& path) {
  const auto text = read_file(path);
  // Sniff the kind only; the typed parsers below do the strict checks.
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw SchemaError("invalid JSON");
  if (doc.is_object() && doc.contains("nodes")) {
    parse_formalization(text);
    return "formalization";
  }
  if (doc.is_object() && doc.contains("classes")) {
    auto trees_dir = path.parent_path().parent_path() / "formalizations";
    if (!fs::is_directory(trees_dir)) {
      throw SchemaError("matching has no sibling formalizations/ directory to check against");
    }
    std::vector<Formalization> trees;
    for (const auto& file : json_files(trees_dir)) trees.push_back(parse_formalization(read_file(file)));
    parse_matching(text, trees);
    return "matching";
  }
  throw SchemaError("neither a formalization (no 'nodes') nor a matching (no 'classes')");
}

}  // namespace

fs::path Workspace::provision_dir(const std::string& id) const { return root_ / "provisions" / id; }
fs::path Workspace::formalizations_dir(const std::string& id) const { return provision_dir(id) / "formalizations"; }
fs::path Workspace::matchings_dir(const std::string& id) const { return provision_dir(id) / "matchings"; }
fs::path Workspace::covers_dir(const std::string& id) const { return provision_dir(id) / "covers"; }
fs::path Workspace::reports_dir(const std::string& id) const { return provision_dir(id) / "reports"; }

std::vector<std::string> Workspace::provisions() const {
  std::vector<std::string> ids;
  const auto dir = root_ / "provisions";
  if (!fs::is_directory(dir)) return ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) ids.push_back(entry.path().filename().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<Formalization> Workspace::load_formalizations(const std::string& id) const {
  const auto files = json_files(formalizations_dir(id));
  if (files.empty()) throw EmptyInput("no formalizations under " + formalizations_dir(id).string());
  std::vector<Formalization> trees;
  for (const auto& file : files) {
    try {
      trees.push_back(parse_formalization(read_file(file)));
    } catch (const StructureError& e) {
      throw StructureError([&] {
        auto v = e.violations();
        for (auto& s : v) s = file.filename().string() + ": " + s;
        return v;
      }());
    } catch (const SchemaError& e) {
      throw SchemaError(file.filename().string() + ": " + e.what());
    }
  }
  std::sort(trees.begin(), trees.end(),
            [](const Formalization& x, const Formalization& y) { return x.tree_id < y.tree_id; });
  for (std::size_t i = 1; i < trees.size(); ++i) {
    if (trees[i].tree_id == trees[i - 1].tree_id) throw SchemaError("tree id '" + trees[i].tree_id + "' used twice");
  }
  return trees;
}

fs::path Workspace::matching_file(const std::string& id) const {
  const auto files = json_files(matchings_dir(id));
  if (files.empty()) throw EmptyInput("no matching under " + matchings_dir(id).string());
  return files.front();
}

Matching Workspace::load_matching(const std::string& id, std::span<const Formalization> trees) const {
  const auto file = matching_file(id);
  try {
    return parse_matching(read_file(file), trees);
  } catch (const Error& e) {
    throw SchemaError(file.filename().string() + ": " + describe(e));
  }
}

std::string Workspace::provision_text(const std::string& id) const {
  const auto path = provision_dir(id) / "provision.txt";
  return fs::exists(path) ? read_file(path) : std::string{};
}

std::string cover_file_name(const Interface& iface, const Formalization& a, const Formalization& b,
                            std::size_t cap) {
  std::string key = a.provision_id + "\n" + a.tree_id + "\n" + b.tree_id + "\n" + compile(a, iface).to_string() +
                    "\n" + compile(b, iface).to_string() + "\n" + std::to_string(cap);
  return sanitize(a.tree_id) + "__" + sanitize(b.tree_id) + "-" + detail::hex64(detail::fnv1a(key)).substr(0, 12) +
         ".json";
}

int cmd_validate(std::span<const fs::path> paths, std::ostream& out, std::ostream& err) {
  std::vector<fs::path> files;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      auto found = json_files(p, true);
      if (found.empty()) err << "warning: no JSON documents under " << p.string() << "\n";
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::exists(p)) {
      files.push_back(p);
    } else {
      err << p.string() << ": no such file or directory\n";
      return kExitValidation;
    }
  }
  // Generated outputs live next to the inputs; they are not documents.
  std::erase_if(files, [](const fs::path& file) {
    const auto parent = file.parent_path().filename();
    return parent == "covers" || parent == "reports";
  });
  int failures = 0;
  for (const auto& file : files) {
    try {
      const auto kind = validate_file(file);
      out << file.string() << ": ok (" << kind << ")\n";
    } catch (const StructureError& e) {
      ++failures;
      out << file.string() << ": invalid\n";
      for (const auto& v : e.violations()) out << "  " << v << "\n";
    } catch (const Error& e) {
      ++failures;
      out << file.string() << ": invalid\n  " << e.kind() << ": " << e.what() << "\n";
    }
  }
  out << files.size() - failures << "/" << files.size() << " documents valid\n";
  return failures == 0 ? kExitOk : kExitValidation;
}

int cmd_analyze(const Workspace& ws, const std::string& provision, const AnalyzeOptions& options,
                std::ostream& out, std::ostream& err) {
  auto loaded = load_provision(ws, provision, err);
  if (!loaded) return kExitValidation;
  const Matching& m = *loaded->matching;

  const auto jobs = all_pairs(loaded->trees);
  std::vector<PairOutcome> outcomes(jobs.size());
  parallel_for(jobs.size(), options.jobs, [&](std::size_t i) { outcomes[i] = analyze_pair(m, jobs[i], options); });

  const auto covers = ws.covers_dir(provision);
  fs::create_directories(covers);
  std::set<std::string> keep{"index.json", "interfaces.json"};
  std::vector<PairRecord> records;
  std::vector<Interface> interfaces;
  json index_pairs = json::array();
  json failures = json::array();
  for (const auto& o : outcomes) {
    json entry{{"pair", {o.record.tree_a, o.record.tree_b}}};
    if (o.error) {
      err << "error: " << provision << ": pair " << o.record.tree_a << "/" << o.record.tree_b << ": " << *o.error
          << "\n";
      entry["error"] = *o.error;
      failures.push_back({{"pair", {o.record.tree_a, o.record.tree_b}}, {"error", *o.error}});
      index_pairs.push_back(std::move(entry));
      continue;
    }
    entry["cover"] = o.cover_file ? json(*o.cover_file) : json(nullptr);
    if (o.cover_file) {
      write_file(covers / *o.cover_file, *o.cover_json);
      keep.insert(*o.cover_file);
    }
    if (o.record.cap_hit) {
      err << "warning: " << provision << ": pair " << o.record.tree_a << "/" << o.record.tree_b
          << " stopped at the cap of " << options.cap << " prime implicants\n";
    }
    index_pairs.push_back(std::move(entry));
    records.push_back(o.record);
    interfaces.push_back(o.iface);
  }
  for (const auto& file : json_files(covers)) {
    if (!keep.count(file.filename().string())) fs::remove(file);
  }
  write_file(covers / "interfaces.json", serialize_interfaces(interfaces));
  write_file(covers / "index.json", json{{"cap", options.cap}, {"pairs", std::move(index_pairs)}}.dump(2) + "\n");

  const auto reports = ws.reports_dir(provision);
  write_file(reports / "pairs.csv", records_csv(records));
  write_file(reports / "pairs.json", records_json(records));
  write_file(reports / "failures.json", failures.dump(2) + "\n");

  std::size_t equivalent = 0;
  std::size_t above = 0;
  for (const auto& r : records) {
    equivalent += r.equivalent;
    above += r.coverage >= options.coverage_threshold;
  }
  out << provision << ": " << loaded->trees.size() << " formalizations, " << jobs.size() << " pairs, " << equivalent
      << " equivalent, " << above << " with coverage >= " << detail::format_double(options.coverage_threshold);
  if (!failures.empty()) out << ", " << failures.size() << " failed";
  out << "\n";
  return failures.empty() ? kExitOk : kExitPartial;
}

int cmd_triage(const Workspace& ws, const std::string& provision, const TriageOptions& options,
               std::ostream& out, std::ostream& err) {
  auto loaded = load_provision(ws, provision, err);
  if (!loaded) return kExitValidation;
  const Matching& m = *loaded->matching;
  TriageInput input;
  try {
    input = load_covers(ws, provision, m);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  std::vector<Representative> reps;
  try {
    reps = select_representatives(m, input.pairs, options);
  } catch (const ResourceLimit& e) {
    err << "error: " << provision << ": " << e.what() << "\n";
    return kExitPartial;
  }
  write_file(ws.reports_dir(provision) / "representatives.json", serialize_representatives(m, reps));
  out << provision << ": " << reps.size() << " representative edge case" << (reps.size() == 1 ? "" : "s") << "\n";
  if (input.failed_pairs) {
    err << "warning: " << provision << ": " << input.failed_pairs << " pair(s) failed analysis and were skipped\n";
    return kExitPartial;
  }
  return kExitOk;
}

ConsistencyReport consistency(const fs::path& runs_dir, std::span<const Formalization> formalizations) {
  ConsistencyReport report;
  std::vector<PairSet> sets;
  for (const auto& file : json_files(runs_dir)) {
    ++report.runs;
    try {
      auto m = parse_matching(read_file(file), formalizations);
      sets.push_back(co_membership(m));
      report.valid.push_back(file.filename().string());
    } catch (const Error& e) {
      report.invalid.emplace_back(file.filename().string(), describe(e));
    }
  }
  if (sets.size() >= 2) report.jaccard = jaccard_n(sets);
  return report;
}

int cmd_consistency(const fs::path& runs_dir, const std::optional<fs::path>& formalizations_dir, std::ostream& out,
                    std::ostream& err) {
  const auto trees_dir = formalizations_dir.value_or(runs_dir.parent_path() / "formalizations");
  std::vector<Formalization> trees;
  try {
    for (const auto& file : json_files(trees_dir)) trees.push_back(parse_formalization(read_file(file)));
  } catch (const Error& e) {
    err << "error: " << trees_dir.string() << ": " << describe(e) << "\n";
    return kExitValidation;
  }
  if (trees.empty()) {
    err << "error: no formalizations under " << trees_dir.string() << "\n";
    return kExitValidation;
  }
  const auto report = consistency(runs_dir, trees);
  if (report.runs < 2) {
    err << "error: need at least 2 matching runs under " << runs_dir.string() << "\n";
    return kExitValidation;
  }
  json invalid = json::array();
  for (const auto& [file, reason] : report.invalid) invalid.push_back({{"file", file}, {"reason", reason}});
  json doc{{"runs", report.runs},
           {"valid_runs", report.valid.size()},
           {"valid", report.valid},
           {"invalid", std::move(invalid)},
           {"jaccard", report.jaccard ? json(*report.jaccard) : json("undefined")}};
  out << doc.dump(2) << "\n";
  return kExitOk;
}

int cmd_verbalize(const Workspace& ws, const std::string& provision, const VerbalizeOptions& options,
                  std::ostream& out, std::ostream& err) {
  if (options.offline) {
    err << "error: verbalize needs a language model and --offline forbids network access\n";
    return kExitTransport;
  }
  std::optional<Gateway> gateway;
  std::shared_ptr<RecordingTransport> recorder;
  try {
    if (!options.config_path) throw ConfigError("verbalize needs --config");
    auto config = GatewayConfig::parse(read_file(*options.config_path));
    std::shared_ptr<Transport> transport =
        options.transport ? options.transport : std::make_shared<HttpTransport>(config);
    if (config.record_dir) {
      recorder = std::make_shared<RecordingTransport>(transport);
      transport = recorder;
    }
    gateway.emplace(config, transport);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitTransport;
  }

  auto loaded = load_provision(ws, provision, err);
  if (!loaded) return kExitValidation;
  const Matching& m = *loaded->matching;
  std::vector<Representative> reps;
  try {
    auto input = load_covers(ws, provision, m);
    reps = select_representatives(m, input.pairs, options.triage);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  const auto text = ws.provision_text(provision);
  if (text.empty()) err << "warning: " << provision << ": no provision.txt; prompts carry no law text\n";
  json rows = json::array();
  bool transport_failed = false;
  bool exhausted = false;
  for (const auto& rep : reps) {
    json row{{"signature", rep.signature.digest()}, {"pair", {rep.pi.pair.tree_a, rep.pi.pair.tree_b}}};
    try {
      auto v = gateway->verbalize(rep, text, m);
      row["scenario"] = v.scenario;
      row["question"] = v.question;
      row["conclusion_a"] = v.conclusion_a;
      row["conclusion_b"] = v.conclusion_b;
      row["stipulated"] = v.stipulated;
      row["requests"] = v.requests;
    } catch (const TransportError& e) {
      transport_failed = true;
      row["error"] = std::string("TransportError: ") + e.what();
    } catch (const ValidationExhausted& e) {
      exhausted = true;
      row["error"] = std::string("ValidationExhausted: ") + e.what();
    } catch (const ConfigError& e) {
      transport_failed = true;
      row["error"] = std::string("ConfigError: ") + e.what();
    }
    if (row.contains("error")) err << "error: " << provision << ": " << row["error"].get<std::string>() << "\n";
    rows.push_back(std::move(row));
  }
  write_file(ws.reports_dir(provision) / "verbalizations.json", rows.dump(2) + "\n");
  if (recorder) {
    write_file(*gateway->config().record_dir / ("verbalize-" + sanitize(provision) + ".json"), recorder->transcript());
  }
  out << provision << ": " << rows.size() << " representative(s) verbalized\n";
  if (transport_failed) return kExitTransport;
  return exhausted ? kExitPartial : kExitOk;
}

int cmd_report(const Workspace& ws, std::span<const std::string> provisions, std::ostream& out, std::ostream& err) {
  std::vector<std::string> ids(provisions.begin(), provisions.end());
  if (ids.empty()) ids = ws.provisions();
  std::sort(ids.begin(), ids.end());
  std::vector<PairRecord> all;
  int status = kExitOk;
  for (const auto& id : ids) {
    const auto path = ws.reports_dir(id) / "pairs.json";
    if (!fs::exists(path)) {
      err << "warning: " << id << ": no pair records; run `lexdiff analyze " << id << "` first\n";
      status = kExitPartial;
      continue;
    }
    try {
      auto records = parse_records_json(read_file(path));
      all.insert(all.end(), records.begin(), records.end());
    } catch (const Error& e) {
      err << "error: " << id << ": " << e.what() << "\n";
      status = kExitValidation;
    }
  }
  write_file(ws.root() / "reports" / "pairs.csv", records_csv(all));
  write_file(ws.root() / "reports" / "pairs.json", records_json(all));

  static constexpr double kEdges[] = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  out << all.size() << " pair records from " << ids.size() << " provision(s)\n";
  out << "coverage bucket  pairs  equivalent\n";
  for (const auto& b : bucket_equivalence(all, kEdges)) {
    out << "[" << detail::format_double(b.lo) << ", " << detail::format_double(b.hi) << (b.hi == 1.0 ? "]" : ")")
        << "  " << b.count << "  "
        << (b.equivalent_share ? detail::format_double(*b.equivalent_share) : std::string("-")) << "\n";
  }
  return status;
}

}  // namespace lexdiff
