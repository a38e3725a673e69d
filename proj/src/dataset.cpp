#include "cghash/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cghash/error.hpp"
#include "cghash/kernels.hpp"

namespace cghash {

namespace {

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw ParseError("line " + std::to_string(line_no) + ": non-numeric field '" +
                     std::string(field) + "'");
  return value;
}

int parse_label(std::string_view field, std::size_t line_no) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw ParseError("line " + std::to_string(line_no) + ": non-integer label '" +
                     std::string(field) + "'");
  if (value < 0)
    throw ParseError("line " + std::to_string(line_no) + ": negative label " +
                     std::to_string(value));
  return static_cast<int>(value);
}

}  // namespace

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");

  Dataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;

    std::vector<std::string_view> fields;
    std::string_view rest = line;
    while (true) {
      auto comma = rest.find(',');
      fields.push_back(strip(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() < 2)
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected label plus at least one feature");

    std::size_t row_dim = fields.size() - 1;
    if (ds.n == 0) {
      ds.dim = row_dim;
    } else if (row_dim != ds.dim) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(ds.dim + 1) + " fields, got " +
                       std::to_string(fields.size()));
    }

    ds.labels.push_back(parse_label(fields[0], line_no));
    for (std::size_t j = 1; j < fields.size(); ++j)
      ds.features.push_back(parse_double(fields[j], line_no));
    ++ds.n;
  }
  if (ds.n == 0) throw ParseError("'" + path + "': no samples");
  return ds;
}

Dataset apply_normalization(const Dataset& ds, std::span<const double> mean,
                            std::span<const double> std) {
  if (mean.size() != ds.dim || std.size() != ds.dim)
    throw ConfigError("normalization statistics have dimension " +
                      std::to_string(mean.size()) + ", data has " +
                      std::to_string(ds.dim));
  Dataset out = ds;
  out.feature_mean.assign(mean.begin(), mean.end());
  out.feature_std.assign(std.begin(), std.end());
  for (std::size_t m = 0; m < ds.n; ++m)
    for (std::size_t j = 0; j < ds.dim; ++j)
      out.features[m * ds.dim + j] = (ds.features[m * ds.dim + j] - mean[j]) / std[j];
  return out;
}

Dataset normalize(const Dataset& ds) {
  if (ds.n < 2) throw ConfigError("normalize requires at least 2 samples");

  std::vector<double> mean(ds.dim, 0.0), std(ds.dim, 0.0);
  for (std::size_t m = 0; m < ds.n; ++m)
    for (std::size_t j = 0; j < ds.dim; ++j) mean[j] += ds.features[m * ds.dim + j];
  for (auto& v : mean) v /= static_cast<double>(ds.n);

  for (std::size_t m = 0; m < ds.n; ++m)
    for (std::size_t j = 0; j < ds.dim; ++j) {
      double d = ds.features[m * ds.dim + j] - mean[j];
      std[j] += d * d;
    }
  for (auto& v : std) {
    v = std::sqrt(v / static_cast<double>(ds.n));
    if (v < 1e-12) v = 1.0;  // constant column -> maps to 0
  }
  return apply_normalization(ds, mean, std);
}

namespace {

// Indices of the K nearest rows to `anchor` among `candidates`, by squared
// Euclidean distance, ties by smaller index.
std::vector<std::size_t> k_nearest(const Dataset& ds, std::size_t anchor,
                                   const std::vector<std::size_t>& candidates,
                                   std::size_t K) {
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(candidates.size());
  auto a = ds.row(anchor);
  for (std::size_t c : candidates) {
    if (c == anchor) continue;
    scored.emplace_back(kernels::squared_l2(a.data(), ds.row(c).data(), ds.dim), c);
  }
  std::sort(scored.begin(), scored.end());
  std::vector<std::size_t> out;
  out.reserve(K);
  for (std::size_t i = 0; i < K && i < scored.size(); ++i)
    out.push_back(scored[i].second);
  return out;
}

struct NeighborIndex {
  std::map<int, std::vector<std::size_t>> by_label;

  explicit NeighborIndex(const Dataset& ds) {
    for (std::size_t m = 0; m < ds.n; ++m) by_label[ds.labels[m]].push_back(m);
  }

  // Anchors need K same-label partners and, for triplets, K different-label
  // samples; classes too small to anchor are skipped. When nothing can
  // anchor the generation fails, naming the first offending class.
  bool can_anchor(const Dataset& ds, int label, std::size_t K,
                  bool need_negatives) const {
    const auto& members = by_label.at(label);
    if (members.size() < K + 1) return false;
    return !need_negatives || ds.n - members.size() >= K;
  }

  void require_some_anchor(const Dataset& ds, std::size_t K,
                           bool need_negatives) const {
    for (const auto& [label, members] : by_label)
      if (can_anchor(ds, label, K, need_negatives)) return;
    for (const auto& [label, members] : by_label) {
      if (members.size() < K + 1)
        throw ConfigError("class " + std::to_string(label) + " has " +
                          std::to_string(members.size()) +
                          " members, need at least " + std::to_string(K + 1));
      if (need_negatives && ds.n - members.size() < K)
        throw ConfigError("class " + std::to_string(label) + " leaves only " +
                          std::to_string(ds.n - members.size()) +
                          " different-label samples, need at least " +
                          std::to_string(K));
    }
  }
};

}  // namespace

std::vector<Triplet> generate_triplets(const Dataset& ds, std::size_t K,
                                       TripletPairing pairing, std::uint64_t /*seed*/) {
  if (K < 1) throw ConfigError("K must be at least 1");
  NeighborIndex index(ds);
  index.require_some_anchor(ds, K, /*need_negatives=*/true);

  std::vector<std::size_t> others;
  std::vector<Triplet> triplets;
  for (std::size_t m = 0; m < ds.n; ++m) {
    if (!index.can_anchor(ds, ds.labels[m], K, /*need_negatives=*/true)) continue;
    const auto& same = index.by_label.at(ds.labels[m]);
    others.clear();
    for (const auto& [label, members] : index.by_label) {
      if (label == ds.labels[m]) continue;
      others.insert(others.end(), members.begin(), members.end());
    }

    auto pos = k_nearest(ds, m, same, K);
    auto neg = k_nearest(ds, m, others, K);
    if (pairing == TripletPairing::cross) {
      for (std::size_t p : pos)
        for (std::size_t q : neg) triplets.push_back({m, p, q});
    } else {
      for (std::size_t r = 0; r < K; ++r) triplets.push_back({m, pos[r], neg[r]});
    }
  }
  return triplets;
}

DupletSet generate_duplets(const Dataset& ds, std::size_t K) {
  DupletSet out;
  if (K == 0) return out;
  NeighborIndex index(ds);
  index.require_some_anchor(ds, K, /*need_negatives=*/false);

  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t m = 0; m < ds.n; ++m) {
    if (!index.can_anchor(ds, ds.labels[m], K, /*need_negatives=*/false)) continue;
    const auto& same = index.by_label.at(ds.labels[m]);
    for (std::size_t p : k_nearest(ds, m, same, K)) {
      auto key = std::minmax(m, p);
      if (seen.insert({key.first, key.second}).second) out.pairs.push_back({m, p});
    }
  }
  return out;
}

}  // namespace cghash
