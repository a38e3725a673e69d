#pragma once

#include <string>

namespace cghash {

/// Convex margin losses. squared_hinge, logistic and exponential are smooth
/// and usable for training; hinge is evaluation-only (its derivative at the
/// kink is not defined, so the dual map never sees it).
enum class LossKind { hinge, squared_hinge, logistic, exponential };

bool is_smooth(LossKind kind);

const char* loss_name(LossKind kind);
LossKind loss_from_name(const std::string& name);  // throws ConfigError

/// f(rho), always >= 0.
double loss_value(LossKind kind, double rho);

/// Analytic f'(rho). Throws ConfigError for hinge.
double loss_derivative(LossKind kind, double rho);

/// Dual variable recovered from a margin: -f'(rho), nonnegative for all
/// supported losses.
double dual_from_margin(LossKind kind, double rho);

/// Fenchel conjugate f*(u) = sup_rho (u*rho - f(rho)); returns +infinity
/// outside the conjugate's effective domain.
double fenchel_conjugate(LossKind kind, double u);

}  // namespace cghash
