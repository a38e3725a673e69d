#pragma once

#include <span>
#include <vector>

#include "cghash/code_table.hpp"

namespace cghash {

struct EvalOptions {
  /// Drop database entry i from query i's ranking; only meaningful when the
  /// query set is the database itself in row order.
  bool exclude_self = false;
};

/// 101-point interpolated precision-recall curve averaged over queries;
/// precision at recall r is the best precision among cuts reaching recall
/// at least r, so the curve is non-increasing.
struct PRCurve {
  std::vector<double> recall;     // 0.00, 0.01, ..., 1.00
  std::vector<double> precision;  // averaged over queries, same length
  double average_precision = 0.0;
};

/// Relevance is same-class-label. Throws ConfigError when some query has no
/// relevant database item.
PRCurve pr_curve(const CodeTable& table, std::span<const BitCode> queries,
                 std::span<const int> query_labels, std::span<const int> db_labels,
                 const EvalOptions& opts = {});

/// Mean over queries of (same-label items among the top k) / k.
double topk_proportion(const CodeTable& table, std::span<const BitCode> queries,
                       std::span<const int> query_labels,
                       std::span<const int> db_labels, std::size_t k,
                       const EvalOptions& opts = {});

/// Majority label among the K nearest; vote ties go to the smallest label.
std::vector<int> knn_classify(const CodeTable& table, std::span<const BitCode> queries,
                              std::span<const int> db_labels, std::size_t K,
                              const EvalOptions& opts = {});

}  // namespace cghash
