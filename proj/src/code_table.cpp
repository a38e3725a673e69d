#include "cghash/code_table.hpp"

#include <algorithm>
#include <string>

#include "cghash/error.hpp"
#include "cghash/kernels.hpp"

namespace cghash {

namespace {

std::vector<double> pad_weights(std::span<const double> weights,
                                std::size_t words_per_code) {
  std::vector<double> padded(words_per_code * 64, 0.0);
  std::copy(weights.begin(), weights.end(), padded.begin());
  return padded;
}

}  // namespace

CodeTable build_code_table(std::span<const HashFunction> functions,
                           std::span<const double> weights, const Dataset& ds) {
  if (functions.size() != weights.size())
    throw ConfigError("expected one weight per hash function");
  CodeTable table;
  table.nbits = functions.size();
  table.words_per_code = (table.nbits + 63) / 64;
  table.weights = pad_weights(weights, table.words_per_code);
  table.codes.reserve(ds.n * table.words_per_code);
  table.ids.reserve(ds.n);
  for (std::size_t m = 0; m < ds.n; ++m) {
    BitCode code = encode(functions, ds.row(m));
    table.codes.insert(table.codes.end(), code.words.begin(), code.words.end());
    table.ids.push_back(m);
  }
  return table;
}

CodeTable build_code_table(const HashModel& model, const Dataset& ds) {
  if (ds.n > 0 && ds.dim != model.dim())
    throw ConfigError("dataset dimension " + std::to_string(ds.dim) +
                      " does not match model dimension " + std::to_string(model.dim()));
  return build_code_table(model.functions, model.weights, ds);
}

double weighted_hamming(const BitCode& c1, const BitCode& c2,
                        std::span<const double> weights) {
  if (c1.nbits != c2.nbits)
    throw ConfigError("code lengths differ: " + std::to_string(c1.nbits) + " vs " +
                      std::to_string(c2.nbits));
  if (weights.size() != c1.nbits)
    throw ConfigError("expected " + std::to_string(c1.nbits) + " weights, got " +
                      std::to_string(weights.size()));
  std::size_t nwords = (c1.nbits + 63) / 64;
  auto padded = pad_weights(weights, nwords);
  return kernels::weighted_hamming(c1.words.data(), c2.words.data(), padded.data(),
                                   nwords);
}

std::vector<QueryHit> query(const CodeTable& table, const BitCode& q, std::size_t k,
                            std::optional<std::uint64_t> exclude_id) {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (q.nbits != table.nbits)
    throw ConfigError("query code has " + std::to_string(q.nbits) + " bits, table has " +
                      std::to_string(table.nbits));

  std::vector<QueryHit> hits;
  hits.reserve(table.size());
  for (std::size_t m = 0; m < table.size(); ++m) {
    if (exclude_id && table.ids[m] == *exclude_id) continue;
    double dist = kernels::weighted_hamming(q.words.data(), table.code(m).data(),
                                            table.weights.data(), table.words_per_code);
    hits.push_back({table.ids[m], dist});
  }

  auto cmp = [](const QueryHit& a, const QueryHit& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.id < b.id;
  };
  if (k < hits.size()) {
    std::partial_sort(hits.begin(), hits.begin() + k, hits.end(), cmp);
    hits.resize(k);
  } else {
    std::sort(hits.begin(), hits.end(), cmp);
  }
  return hits;
}

}  // namespace cghash
