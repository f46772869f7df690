#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lexdiff {

/// One analyzed pair. A cap_hit pair is non-equivalent and its pi_count is a
/// lower bound.
struct PairRecord {
  std::string provision_id;
  std::string tree_a;
  std::string tree_b;
  double coverage = 0.0;
  bool equivalent = false;
  std::size_t pi_count = 0;
  bool cap_hit = false;

  friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

struct BucketStat {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  std::size_t equivalent = 0;
  std::optional<double> equivalent_share;  // nullopt for an empty bucket
};

/// Buckets are [lo, hi) except the last, which is closed. Edges must be
/// strictly increasing within [0, 1]; records outside the edge range are a
/// BadEdges error.
std::vector<BucketStat> bucket_equivalence(std::span<const PairRecord> records,
                                           std::span<const double> edges);

/// Per model, the share of its pairs with coverage >= min_coverage that are
/// non-equivalent. Models without such pairs are omitted.
std::map<std::string, double> model_nonequivalence(std::span<const PairRecord> records,
                                                   double min_coverage);

/// Spearman rank correlation with average ranks for ties; nullopt when
/// either series is constant. Throws LengthMismatch.
std::optional<double> spearman_rho(std::span<const double> xs, std::span<const double> ys);

inline constexpr std::string_view kRecordColumns =
    "provision,pair_a,pair_b,coverage,equivalent,pi_count,cap_hit";

std::string records_csv(std::span<const PairRecord> records);
std::string records_json(std::span<const PairRecord> records);
std::vector<PairRecord> parse_records_json(std::string_view text);

}  // namespace lexdiff
