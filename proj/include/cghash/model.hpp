#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cghash/hash.hpp"
#include "cghash/loss.hpp"

namespace cghash {

enum class Regularizer { l1, linf, duplet_weighted_l1 };

enum class HashFamily { linear, stump };

const char* regularizer_name(Regularizer r);
Regularizer regularizer_from_name(const std::string& name);  // throws ConfigError
const char* family_name(HashFamily f);
HashFamily family_from_name(const std::string& name);  // throws ConfigError

struct TrainConfig {
  int bits = 60;
  LossKind loss = LossKind::squared_hinge;
  Regularizer reg = Regularizer::l1;
  double C = 1.0;
  double C_prime = 1.0;  // box bound for the linf regularizer
  HashFamily family = HashFamily::linear;
  int multistart = 10;
  int max_primal_iters = 1000;
  double primal_tol = 1e-7;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

/// Ordered hash functions with their nonnegative weights, plus the feature
/// statistics inputs must be normalized with before hashing.
struct HashModel {
  std::vector<HashFunction> functions;
  std::vector<double> weights;
  std::vector<double> feature_mean;
  std::vector<double> feature_std;
  TrainConfig config;

  std::size_t bits() const { return functions.size(); }
  std::size_t dim() const { return feature_mean.size(); }
};

/// Text format, one hash function per line, floats printed with 17
/// significant digits so that save -> load is lossless.
void save_model(const HashModel& model, const std::string& path);
HashModel load_model(const std::string& path);  // throws ParseError

std::string model_to_string(const HashModel& model);
HashModel model_from_string(const std::string& text);

}  // namespace cghash
