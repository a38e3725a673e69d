#include "cghash/loss.hpp"

#include <cmath>
#include <limits>

#include "cghash/error.hpp"

namespace cghash {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

// x * log(x) with the 0*log(0) = 0 convention.
double xlogx(double x) { return x > 0 ? x * std::log(x) : 0.0; }

}  // namespace

bool is_smooth(LossKind kind) { return kind != LossKind::hinge; }

const char* loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::hinge: return "hinge";
    case LossKind::squared_hinge: return "sqhinge";
    case LossKind::logistic: return "logistic";
    case LossKind::exponential: return "exp";
  }
  return "?";
}

LossKind loss_from_name(const std::string& name) {
  if (name == "hinge") return LossKind::hinge;
  if (name == "sqhinge") return LossKind::squared_hinge;
  if (name == "logistic") return LossKind::logistic;
  if (name == "exp") return LossKind::exponential;
  throw ConfigError("unknown loss '" + name + "'");
}

double loss_value(LossKind kind, double rho) {
  switch (kind) {
    case LossKind::hinge: return std::max(0.0, 1.0 - rho);
    case LossKind::squared_hinge: {
      double t = std::max(0.0, 1.0 - rho);
      return t * t;
    }
    case LossKind::logistic: return softplus(-rho);
    case LossKind::exponential: return std::exp(-rho);
  }
  return 0.0;
}

double loss_derivative(LossKind kind, double rho) {
  switch (kind) {
    case LossKind::hinge:
      throw ConfigError("hinge loss has no derivative; use a smooth loss");
    case LossKind::squared_hinge: return -2.0 * std::max(0.0, 1.0 - rho);
    case LossKind::logistic: return -1.0 / (1.0 + std::exp(rho));
    case LossKind::exponential: return -std::exp(-rho);
  }
  return 0.0;
}

double dual_from_margin(LossKind kind, double rho) {
  return -loss_derivative(kind, rho);
}

double fenchel_conjugate(LossKind kind, double u) {
  switch (kind) {
    case LossKind::hinge:
      if (u < -1.0 || u > 0.0) return kInf;
      return u;
    case LossKind::squared_hinge:
      if (u > 0.0) return kInf;
      return u + 0.25 * u * u;
    case LossKind::logistic: {
      if (u < -1.0 || u > 0.0) return kInf;
      double s = -u;
      return xlogx(s) + xlogx(1.0 - s);
    }
    case LossKind::exponential: {
      if (u > 0.0) return kInf;
      double s = -u;
      return xlogx(s) - s;
    }
  }
  return kInf;
}

}  // namespace cghash
