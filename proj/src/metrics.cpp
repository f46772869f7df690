#include "lexdiff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "lexdiff/errors.hpp"
#include "support.hpp"

namespace lexdiff {

using detail::json;

std::vector<BucketStat> bucket_equivalence(std::span<const PairRecord> records,
                                           std::span<const double> edges) {
  if (edges.size() < 2) throw BadEdges("need at least two bucket edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!(edges[i] >= 0.0 && edges[i] <= 1.0)) throw BadEdges("bucket edges must lie in [0, 1]");
    if (i > 0 && !(edges[i] > edges[i - 1])) throw BadEdges("bucket edges must be strictly increasing");
  }
  std::vector<BucketStat> out;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) out.push_back({edges[i], edges[i + 1], 0, 0, {}});

  for (const auto& r : records) {
    if (r.coverage < edges.front() || r.coverage > edges.back()) {
      throw BadEdges("coverage " + detail::format_double(r.coverage) + " lies outside the bucket edges");
    }
    auto upper = std::upper_bound(edges.begin(), edges.end(), r.coverage);
    std::size_t bucket = static_cast<std::size_t>(upper - edges.begin()) - 1;
    if (bucket == out.size()) --bucket;  // last bucket is closed
    ++out[bucket].count;
    if (r.equivalent) ++out[bucket].equivalent;
  }
  for (auto& b : out) {
    if (b.count) b.equivalent_share = static_cast<double>(b.equivalent) / static_cast<double>(b.count);
  }
  return out;
}

std::map<std::string, double> model_nonequivalence(std::span<const PairRecord> records,
                                                   double min_coverage) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;  // (non-equivalent, total)
  for (const auto& r : records) {
    if (r.coverage < min_coverage) continue;
    for (const auto* model : {&r.tree_a, &r.tree_b}) {
      auto& [nonequiv, total] = tally[*model];
      ++total;
      if (!r.equivalent) ++nonequiv;
    }
  }
  std::map<std::string, double> out;
  for (const auto& [model, counts] : tally) {
    out[model] = static_cast<double>(counts.first) / static_cast<double>(counts.second);
  }
  return out;
}

namespace {

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::optional<double> spearman_rho(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw LengthMismatch("series lengths differ");
  if (xs.size() < 2) throw LengthMismatch("need at least two observations");
  auto rx = average_ranks(xs);
  auto ry = average_ranks(ys);
  const double n = static_cast<double>(rx.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string records_csv(std::span<const PairRecord> records) {
  std::ostringstream out;
  out << kRecordColumns << "\n";
  for (const auto& r : records) {
    out << csv_field(r.provision_id) << ',' << csv_field(r.tree_a) << ',' << csv_field(r.tree_b) << ','
        << detail::format_double(r.coverage) << ',' << (r.equivalent ? "true" : "false") << ','
        << r.pi_count << ',' << (r.cap_hit ? "true" : "false") << "\n";
  }
  return out.str();
}

std::string records_json(std::span<const PairRecord> records) {
  json rows = json::array();
  for (const auto& r : records) {
    rows.push_back({{"provision", r.provision_id},
                    {"pair_a", r.tree_a},
                    {"pair_b", r.tree_b},
                    {"coverage", r.coverage},
                    {"equivalent", r.equivalent},
                    {"pi_count", r.pi_count},
                    {"cap_hit", r.cap_hit}});
  }
  return rows.dump(2) + "\n";
}

std::vector<PairRecord> parse_records_json(std::string_view text) {
  json rows = detail::parse_strict(text, "pair records");
  if (!rows.is_array()) throw SchemaError("pair records: expected an array");
  std::vector<PairRecord> out;
  try {
    for (const auto& row : rows) {
      PairRecord r;
      r.provision_id = row.at("provision").get<std::string>();
      r.tree_a = row.at("pair_a").get<std::string>();
      r.tree_b = row.at("pair_b").get<std::string>();
      r.coverage = row.at("coverage").get<double>();
      r.equivalent = row.at("equivalent").get<bool>();
      r.pi_count = row.at("pi_count").get<std::size_t>();
      r.cap_hit = row.at("cap_hit").get<bool>();
      if (r.equivalent && r.pi_count != 0) {
        throw SchemaError("pair records: equivalent pair " + r.tree_a + "/" + r.tree_b + " has edge cases");
      }
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("pair records: ") + e.what());
  }
  return out;
}

}  // namespace lexdiff
