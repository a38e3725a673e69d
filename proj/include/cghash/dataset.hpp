#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cghash {

/// Labeled feature vectors, row-major. `feature_mean`/`feature_std` are
/// empty until normalize() has been applied (they then hold the statistics
/// of the data the normalization was computed from).
struct Dataset {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> features;  // n * dim, row-major
  std::vector<int> labels;       // non-negative, one per row
  std::vector<double> feature_mean;
  std::vector<double> feature_std;

  std::span<const double> row(std::size_t m) const {
    return {features.data() + m * dim, dim};
  }
  bool is_normalized() const { return !feature_mean.empty(); }
};

/// Proximity constraint: anchor should be closer to positive than to negative.
struct Triplet {
  std::size_t anchor;
  std::size_t positive;
  std::size_t negative;

  bool operator==(const Triplet&) const = default;
};

/// Same-label pairs whose distance should be small.
struct DupletSet {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

enum class TripletPairing { cross, matched };

/// Parse `label,f1,...,fD` lines (no header, '.' decimal separator, fields
/// may carry surrounding whitespace). Throws ParseError naming the line on
/// ragged rows, non-numeric fields or an empty file.
Dataset load_csv(const std::string& path);

/// Zero-mean / unit-variance per feature (population standard deviation;
/// constant columns get std clamped to 1 so they map to 0). Returns a new
/// Dataset carrying the statistics of `ds`.
Dataset normalize(const Dataset& ds);

/// Apply previously computed statistics, e.g. a model's, to raw features.
Dataset apply_normalization(const Dataset& ds, std::span<const double> mean,
                            std::span<const double> std);

/// For every anchor, pick its K nearest same-label and K nearest
/// different-label neighbors (Euclidean distance, ties by smaller index) and
/// combine them: `cross` emits all K*K (anchor, pos, neg) combinations,
/// `matched` pairs them by rank. Samples whose class cannot supply K
/// same-label partners are skipped as anchors; if no class can anchor at
/// all, throws ConfigError naming the offending class. The result is fully
/// deterministic; `seed` is accepted for interface stability but
/// tie-breaking never uses it.
std::vector<Triplet> generate_triplets(const Dataset& ds, std::size_t K,
                                       TripletPairing pairing,
                                       std::uint64_t seed = 0);

/// (anchor, pos) pairs for each anchor's K nearest same-label neighbors,
/// de-duplicated as unordered pairs. K = 0 yields an empty set.
DupletSet generate_duplets(const Dataset& ds, std::size_t K);

}  // namespace cghash
