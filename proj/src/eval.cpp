#include "cghash/eval.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "cghash/error.hpp"

namespace cghash {

namespace {

std::optional<std::uint64_t> self_id(const EvalOptions& opts, std::size_t query_index) {
  if (!opts.exclude_self) return std::nullopt;
  return static_cast<std::uint64_t>(query_index);
}

void check_labels(const CodeTable& table, std::span<const int> db_labels) {
  if (db_labels.size() != table.size())
    throw ConfigError("expected " + std::to_string(table.size()) +
                      " database labels, got " + std::to_string(db_labels.size()));
}

}  // namespace

PRCurve pr_curve(const CodeTable& table, std::span<const BitCode> queries,
                 std::span<const int> query_labels, std::span<const int> db_labels,
                 const EvalOptions& opts) {
  check_labels(table, db_labels);
  if (queries.size() != query_labels.size())
    throw ConfigError("expected one label per query");

  constexpr std::size_t kGrid = 101;
  PRCurve curve;
  curve.recall.resize(kGrid);
  curve.precision.assign(kGrid, 0.0);
  for (std::size_t g = 0; g < kGrid; ++g)
    curve.recall[g] = static_cast<double>(g) / 100.0;

  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    auto ranked = query(table, queries[qi], table.size(), self_id(opts, qi));

    std::size_t total_relevant = 0;
    for (const auto& hit : ranked)
      if (db_labels[hit.id] == query_labels[qi]) ++total_relevant;
    if (total_relevant == 0)
      throw ConfigError("query " + std::to_string(qi) +
                        " has no relevant database items");

    std::vector<double> precision_at(ranked.size());
    std::vector<std::size_t> relevant_at(ranked.size());
    std::size_t relevant = 0;
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      if (db_labels[ranked[r].id] == query_labels[qi]) ++relevant;
      relevant_at[r] = relevant;
      precision_at[r] = static_cast<double>(relevant) / static_cast<double>(r + 1);
    }
    // Best precision among this cut and everything to its right.
    std::vector<double> best_right(ranked.size());
    double running = 0.0;
    for (std::size_t r = ranked.size(); r-- > 0;) {
      running = std::max(running, precision_at[r]);
      best_right[r] = running;
    }

    // recall(r) >= g/100  <=>  100 * relevant_at[r] >= g * total_relevant,
    // compared in integers to avoid rounding at the grid points.
    std::size_t cut = 0;
    for (std::size_t g = 0; g < kGrid; ++g) {
      while (cut < ranked.size() && 100 * relevant_at[cut] < g * total_relevant) ++cut;
      // cut < size is guaranteed: the last cut reaches recall 1.
      curve.precision[g] += best_right[cut];
    }
  }

  double inv_q = queries.empty() ? 0.0 : 1.0 / static_cast<double>(queries.size());
  for (auto& p : curve.precision) p *= inv_q;
  double sum = 0.0;
  for (double p : curve.precision) sum += p;
  curve.average_precision = sum / static_cast<double>(kGrid);
  return curve;
}

double topk_proportion(const CodeTable& table, std::span<const BitCode> queries,
                       std::span<const int> query_labels,
                       std::span<const int> db_labels, std::size_t k,
                       const EvalOptions& opts) {
  check_labels(table, db_labels);
  if (queries.size() != query_labels.size())
    throw ConfigError("expected one label per query");
  std::size_t available = table.size() - (opts.exclude_self ? 1 : 0);
  if (k < 1 || k > available)
    throw ConfigError("k must be in [1, " + std::to_string(available) + "]");

  double total = 0.0;
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    auto hits = query(table, queries[qi], k, self_id(opts, qi));
    std::size_t same = 0;
    for (const auto& hit : hits)
      if (db_labels[hit.id] == query_labels[qi]) ++same;
    total += static_cast<double>(same) / static_cast<double>(k);
  }
  return queries.empty() ? 0.0 : total / static_cast<double>(queries.size());
}

std::vector<int> knn_classify(const CodeTable& table, std::span<const BitCode> queries,
                              std::span<const int> db_labels, std::size_t K,
                              const EvalOptions& opts) {
  check_labels(table, db_labels);
  std::size_t available = table.size() - (opts.exclude_self ? 1 : 0);
  if (K < 1 || K > available)
    throw ConfigError("K must be in [1, " + std::to_string(available) + "]");

  std::vector<int> predicted;
  predicted.reserve(queries.size());
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    auto hits = query(table, queries[qi], K, self_id(opts, qi));
    std::map<int, std::size_t> votes;
    for (const auto& hit : hits) ++votes[db_labels[hit.id]];
    int best_label = 0;
    std::size_t best_votes = 0;
    for (const auto& [label, count] : votes) {
      if (count > best_votes) {  // map iterates labels ascending: ties keep the smaller
        best_votes = count;
        best_label = label;
      }
    }
    predicted.push_back(best_label);
  }
  return predicted;
}

}  // namespace cghash
