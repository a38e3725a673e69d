#include "cghash/hash.hpp"

#include <cmath>
#include <string>

#include "cghash/error.hpp"
#include "cghash/kernels.hpp"
#include "cghash/rng.hpp"

namespace cghash {

namespace {

void check_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw ConfigError(std::string(what) + ": expected dimension " +
                      std::to_string(want) + ", got " + std::to_string(got));
}

}  // namespace

int hash_bit(const LinearHash& h, std::span<const double> x) {
  check_dim(x.size(), h.v.size(), "linear hash");
  double z = kernels::dot(h.v.data(), x.data(), x.size()) + h.b;
  return z >= 0.0 ? 1 : 0;
}

int hash_bit(const StumpHash& h, std::span<const double> x) {
  if (h.feature >= x.size())
    throw ConfigError("stump feature " + std::to_string(h.feature) +
                      " out of range for dimension " + std::to_string(x.size()));
  int sign = x[h.feature] >= h.threshold ? 1 : -1;
  return (1 + h.polarity * sign) / 2;
}

int hash_bit(const HashFunction& h, std::span<const double> x) {
  return std::visit([&](const auto& hf) { return hash_bit(hf, x); }, h);
}

double hash_relaxed(const LinearHash& h, std::span<const double> x) {
  check_dim(x.size(), h.v.size(), "linear hash");
  return std::tanh(kernels::dot(h.v.data(), x.data(), x.size()) + h.b);
}

BitCode encode(std::span<const HashFunction> functions, std::span<const double> x) {
  BitCode code = BitCode::zeros(functions.size());
  for (std::size_t j = 0; j < functions.size(); ++j)
    code.set(j, hash_bit(functions[j], x));
  return code;
}

std::vector<LinearHash> lsh_sample(std::size_t dim, std::size_t count,
                                   std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LinearHash> out;
  out.reserve(count);
  for (std::size_t m = 0; m < count; ++m) {
    LinearHash h;
    h.v.resize(dim);
    for (auto& vi : h.v) vi = rng.normal();
    h.b = rng.uniform(-1.0, 1.0);
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace cghash
