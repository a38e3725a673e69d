#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cghash/dataset.hpp"
#include "cghash/model.hpp"

namespace cghash {

/// Bit-packed database codes queried under the weighted Hamming distance.
/// Immutable after build; concurrent queries need no coordination.
struct CodeTable {
  std::size_t nbits = 0;
  std::size_t words_per_code = 0;
  std::vector<std::uint64_t> codes;  // size() * words_per_code
  std::vector<double> weights;       // padded to words_per_code * 64
  std::vector<std::uint64_t> ids;    // unique

  std::size_t size() const { return ids.size(); }
  std::span<const std::uint64_t> code(std::size_t m) const {
    return {codes.data() + m * words_per_code, words_per_code};
  }
};

/// Encode every row of a dataset already normalized with the model's
/// statistics; ids are the row indices.
CodeTable build_code_table(const HashModel& model, const Dataset& ds);

/// Same with explicit functions and weights (the LSH baseline uses all-one
/// weights).
CodeTable build_code_table(std::span<const HashFunction> functions,
                           std::span<const double> weights, const Dataset& ds);

/// Sum of weights over disagreeing bits. Throws ConfigError on length
/// mismatch.
double weighted_hamming(const BitCode& c1, const BitCode& c2,
                        std::span<const double> weights);

struct QueryHit {
  std::uint64_t id = 0;
  double distance = 0.0;
};

/// The k entries nearest to q, ascending distance, ties by ascending id;
/// fewer than k only when the table is smaller. `exclude_id` drops one
/// database entry from the ranking (used when queries come from the
/// database itself).
std::vector<QueryHit> query(const CodeTable& table, const BitCode& q, std::size_t k,
                            std::optional<std::uint64_t> exclude_id = std::nullopt);

}  // namespace cghash
