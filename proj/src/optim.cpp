#include "cghash/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "cghash/error.hpp"

namespace cghash::optim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

struct Pair {
  std::vector<double> s, y;
  double rho;  // 1 / (s.y)
};

}  // namespace

Result minimize(const Objective& f, std::vector<double> x0,
                std::span<const double> lower, std::span<const double> upper,
                const Options& opts) {
  const std::size_t n = x0.size();
  auto lo = [&](std::size_t j) { return lower.empty() ? -kInf : lower[j]; };
  auto hi = [&](std::size_t j) { return upper.empty() ? kInf : upper[j]; };

  auto project = [&](std::vector<double>& x) {
    for (std::size_t j = 0; j < n; ++j) x[j] = std::clamp(x[j], lo(j), hi(j));
  };

  // Gradient with bound-blocked components removed; its infinity norm is
  // the first-order optimality measure on the box.
  auto projected_gradient = [&](const std::vector<double>& x,
                                const std::vector<double>& g) {
    std::vector<double> pg(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (x[j] <= lo(j))
        pg[j] = std::min(g[j], 0.0);
      else if (x[j] >= hi(j))
        pg[j] = std::max(g[j], 0.0);
      else
        pg[j] = g[j];
    }
    return pg;
  };
  auto inf_norm = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
  };

  std::vector<double> x = std::move(x0);
  project(x);
  std::vector<double> g(n);
  double fx = f(x, g);
  if (!std::isfinite(fx)) throw NumericError("objective is not finite at the start point");

  std::deque<Pair> memory;
  Result best{x, fx, inf_norm(projected_gradient(x, g)), 0, false};

  std::vector<double> d(n), x_new(n), g_new(n), q(n);
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    auto pg = projected_gradient(x, g);
    double pg_norm = inf_norm(pg);
    if (fx <= best.value) best = {x, fx, pg_norm, iter, false};
    if (pg_norm <= opts.grad_tol) {
      best = {x, fx, pg_norm, iter, true};
      break;
    }

    // Two-loop recursion on the free-variable gradient.
    q = pg;
    std::vector<double> alpha(memory.size());
    for (std::size_t k = memory.size(); k-- > 0;) {
      alpha[k] = memory[k].rho * dot(memory[k].s, q);
      for (std::size_t j = 0; j < n; ++j) q[j] -= alpha[k] * memory[k].y[j];
    }
    if (!memory.empty()) {
      const Pair& last = memory.back();
      double gamma = 1.0 / (last.rho * dot(last.y, last.y));
      for (auto& v : q) v *= gamma;
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
      double beta = memory[k].rho * dot(memory[k].y, q);
      for (std::size_t j = 0; j < n; ++j)
        q[j] += (alpha[k] - beta) * memory[k].s[j];
    }
    for (std::size_t j = 0; j < n; ++j) d[j] = -q[j];

    // Zero out directions blocked by an active bound and fall back to
    // projected steepest descent when the result is not a descent direction.
    for (std::size_t j = 0; j < n; ++j) {
      if ((x[j] <= lo(j) && d[j] < 0.0) || (x[j] >= hi(j) && d[j] > 0.0)) d[j] = 0.0;
    }
    if (dot(d, g) >= 0.0) {
      memory.clear();
      for (std::size_t j = 0; j < n; ++j) d[j] = -pg[j];
    }

    // Armijo backtracking along the projected path.
    double step = memory.empty() ? std::min(1.0, 1.0 / std::max(1.0, inf_norm(pg))) : 1.0;
    bool accepted = false;
    double f_new = fx;
    for (int ls = 0; ls < opts.max_line_search; ++ls, step *= 0.5) {
      for (std::size_t j = 0; j < n; ++j) x_new[j] = x[j] + step * d[j];
      project(x_new);
      double gtdx = 0.0;
      for (std::size_t j = 0; j < n; ++j) gtdx += g[j] * (x_new[j] - x[j]);
      if (gtdx >= 0.0) continue;  // fully blocked or uphill at this step
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= fx + opts.armijo * gtdx) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      best.iterations = iter + 1;
      break;  // no further progress possible along this direction
    }

    Pair pair;
    pair.s.resize(n);
    pair.y.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      pair.s[j] = x_new[j] - x[j];
      pair.y[j] = g_new[j] - g[j];
    }
    double sy = dot(pair.s, pair.y);
    if (sy > 1e-10 * norm2(pair.s) * norm2(pair.y)) {
      pair.rho = 1.0 / sy;
      memory.push_back(std::move(pair));
      if (memory.size() > static_cast<std::size_t>(opts.history)) memory.pop_front();
    }

    x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
    best.iterations = iter + 1;
  }

  if (!best.converged && fx < best.value) {
    best.x = x;
    best.value = fx;
  }
  if (!best.converged) {
    // Re-derive the optimality measure at the incumbent.
    std::vector<double> gb(n);
    double fb = f(best.x, gb);
    best.value = fb;
    best.grad_inf_norm = inf_norm(projected_gradient(best.x, gb));
    best.converged = best.grad_inf_norm <= opts.grad_tol;
  }
  return best;
}

Result minimize_free(const Objective& f, std::vector<double> x0, const Options& opts) {
  return minimize(f, std::move(x0), {}, {}, opts);
}

}  // namespace cghash::optim
