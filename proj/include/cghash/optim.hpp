#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cghash::optim {

struct Options {
  int max_iters = 500;
  double grad_tol = 1e-8;  // projected-gradient infinity norm
  int history = 10;        // quasi-Newton memory
  int max_line_search = 50;
  double armijo = 1e-4;
};

struct Result {
  std::vector<double> x;
  double value = 0.0;
  double grad_inf_norm = 0.0;  // projected gradient at x
  int iterations = 0;
  bool converged = false;
};

/// Evaluate the objective at x and fill grad (same length as x).
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

/// Minimize f over the box [lower, upper] (empty spans mean unbounded)
/// with a projected limited-memory quasi-Newton method: two-loop L-BFGS
/// directions restricted to the free variables, Armijo backtracking along
/// the projected path, convergence on the projected-gradient infinity
/// norm. Descent is monotone, so the returned value never exceeds f(x0).
/// Throws NumericError if the objective is non-finite at the start point.
Result minimize(const Objective& f, std::vector<double> x0,
                std::span<const double> lower, std::span<const double> upper,
                const Options& opts = {});

/// Unbounded convenience wrapper.
Result minimize_free(const Objective& f, std::vector<double> x0,
                     const Options& opts = {});

}  // namespace cghash::optim
