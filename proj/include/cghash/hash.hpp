#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace cghash {

/// Thresholded linear projection: bit = (1 + sign(v.x + b)) / 2, sign(0) = +1.
struct LinearHash {
  std::vector<double> v;
  double b = 0.0;
};

/// Single-feature threshold: bit = (1 + polarity * sign(x[feature] - threshold)) / 2.
struct StumpHash {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = +1;  // +1 or -1
};

using HashFunction = std::variant<LinearHash, StumpHash>;

/// Packed binary code, bit j of sample code = output of hash function j.
/// Bits beyond `nbits` in the last word are always zero.
struct BitCode {
  std::vector<std::uint64_t> words;
  std::size_t nbits = 0;

  static BitCode zeros(std::size_t nbits) {
    return {std::vector<std::uint64_t>((nbits + 63) / 64, 0), nbits};
  }
  int get(std::size_t j) const { return (words[j / 64] >> (j % 64)) & 1u; }
  void set(std::size_t j, int bit) {
    if (bit)
      words[j / 64] |= std::uint64_t(1) << (j % 64);
    else
      words[j / 64] &= ~(std::uint64_t(1) << (j % 64));
  }
  bool operator==(const BitCode&) const = default;
};

/// Bit in {0, 1}. Throws ConfigError on dimension mismatch.
int hash_bit(const LinearHash& h, std::span<const double> x);
int hash_bit(const StumpHash& h, std::span<const double> x);
int hash_bit(const HashFunction& h, std::span<const double> x);

/// tanh(v.x + b), the smooth surrogate of the linear hash sign.
double hash_relaxed(const LinearHash& h, std::span<const double> x);

BitCode encode(std::span<const HashFunction> functions, std::span<const double> x);

/// M random linear hashes, v entrywise standard normal and b uniform on
/// [-1, 1]; reproducible from the seed.
std::vector<LinearHash> lsh_sample(std::size_t dim, std::size_t count,
                                   std::uint64_t seed);

}  // namespace cghash
