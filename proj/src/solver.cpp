#include "cghash/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cghash/error.hpp"
#include "cghash/kernels.hpp"
#include "cghash/optim.hpp"
#include "cghash/rng.hpp"

namespace cghash {

std::vector<std::uint8_t> hash_bits(const HashFunction& h, const Dataset& ds) {
  std::vector<std::uint8_t> bits(ds.n);
  for (std::size_t m = 0; m < ds.n; ++m)
    bits[m] = static_cast<std::uint8_t>(hash_bit(h, ds.row(m)));
  return bits;
}

std::vector<std::int8_t> compute_a_vector(const HashFunction& h,
                                          std::span<const Triplet> triplets,
                                          const Dataset& ds) {
  auto bits = hash_bits(h, ds);
  std::vector<std::int8_t> a(triplets.size());
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    const Triplet& t = triplets[i];
    int ban = std::abs(int(bits[t.anchor]) - int(bits[t.negative]));
    int bap = std::abs(int(bits[t.anchor]) - int(bits[t.positive]));
    a[i] = static_cast<std::int8_t>(ban - bap);
  }
  return a;
}

double subproblem_score(const HashFunction& h, std::span<const double> u,
                        std::span<const Triplet> triplets, const Dataset& ds) {
  auto bits = hash_bits(h, ds);
  double score = 0.0;
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    const Triplet& t = triplets[i];
    int ban = std::abs(int(bits[t.anchor]) - int(bits[t.negative]));
    int bap = std::abs(int(bits[t.anchor]) - int(bits[t.positive]));
    score += u[i] * static_cast<double>(ban - bap);
  }
  return score;
}

double subproblem_score_squared(const HashFunction& h, std::span<const double> u,
                                std::span<const Triplet> triplets,
                                const Dataset& ds) {
  auto bits = hash_bits(h, ds);
  double score = 0.0;
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    const Triplet& t = triplets[i];
    int dn = int(bits[t.anchor]) - int(bits[t.negative]);
    int dp = int(bits[t.anchor]) - int(bits[t.positive]);
    score += u[i] * static_cast<double>(dn * dn - dp * dp);
  }
  return score;
}

StumpHash solve_subproblem_stump(std::span<const double> u,
                                 std::span<const Triplet> triplets,
                                 const Dataset& ds) {
  if (ds.n == 0) throw ConfigError("stump subproblem needs a non-empty dataset");

  StumpHash best{0, 0.0, +1};
  double best_score = -std::numeric_limits<double>::infinity();

  std::vector<double> column(ds.n);
  std::vector<std::uint8_t> bits(ds.n);
  std::vector<double> values;

  for (std::size_t d = 0; d < ds.dim; ++d) {
    for (std::size_t m = 0; m < ds.n; ++m) column[m] = ds.features[m * ds.dim + d];

    values.assign(column.begin(), column.end());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    std::vector<double> thresholds;
    thresholds.reserve(values.size());
    thresholds.push_back(values.front() - 1.0);
    for (std::size_t k = 0; k + 1 < values.size(); ++k)
      thresholds.push_back(0.5 * (values[k] + values[k + 1]));

    for (double theta : thresholds) {
      for (std::size_t m = 0; m < ds.n; ++m) bits[m] = column[m] >= theta ? 1 : 0;
      double score = 0.0;
      for (std::size_t i = 0; i < triplets.size(); ++i) {
        const Triplet& t = triplets[i];
        int ban = std::abs(int(bits[t.anchor]) - int(bits[t.negative]));
        int bap = std::abs(int(bits[t.anchor]) - int(bits[t.positive]));
        score += u[i] * static_cast<double>(ban - bap);
      }
      // Complementing every bit leaves |h(x)-h(z)| unchanged, so the -1
      // polarity scores exactly the same as +1 at the same threshold and,
      // coming later in the tie order, can never be selected.
      if (score > best_score) {
        best_score = score;
        best = {d, theta, +1};
      }
    }
  }
  return best;
}

double tanh_subproblem_objective(const LinearHash& h, std::span<const double> u,
                                 std::span<const Triplet> triplets,
                                 const Dataset& ds, std::span<double> grad) {
  const std::size_t n = ds.n, dim = ds.dim;
  std::vector<double> t(n), dt(n);
  for (std::size_t m = 0; m < n; ++m) {
    double z = kernels::dot(h.v.data(), ds.row(m).data(), dim) + h.b;
    t[m] = std::tanh(z);
    dt[m] = 1.0 - t[m] * t[m];
  }

  double objective = 0.0;
  std::vector<double> delta;
  if (!grad.empty()) delta.assign(n, 0.0);
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    const Triplet& tr = triplets[i];
    double tau_n = t[tr.anchor] - t[tr.negative];
    double tau_p = t[tr.anchor] - t[tr.positive];
    objective += u[i] * (tau_n * tau_n - tau_p * tau_p);
    if (!grad.empty()) {
      delta[tr.anchor] += 2.0 * u[i] * (tau_n - tau_p);
      delta[tr.negative] -= 2.0 * u[i] * tau_n;
      delta[tr.positive] += 2.0 * u[i] * tau_p;
    }
  }

  if (!grad.empty()) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t m = 0; m < n; ++m) {
      double scale = delta[m] * dt[m];
      if (scale == 0.0) continue;
      auto x = ds.row(m);
      for (std::size_t j = 0; j < dim; ++j) grad[j] += scale * x[j];
      grad[dim] += scale;
    }
  }
  return objective;
}

LinearHash solve_subproblem_linear(std::span<const double> u,
                                   std::span<const Triplet> triplets,
                                   const Dataset& ds, int multistart,
                                   std::uint64_t seed) {
  if (multistart < 1) throw ConfigError("multistart must be at least 1");
  auto candidates = lsh_sample(ds.dim, static_cast<std::size_t>(multistart), seed);

  std::size_t best_idx = 0;
  double best_obj = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    double obj = tanh_subproblem_objective(candidates[c], u, triplets, ds);
    if (obj > best_obj) {
      best_obj = obj;
      best_idx = c;
    }
  }
  const LinearHash& start = candidates[best_idx];

  // Ascend on the negated objective; never returns a point worse than the
  // start, so the multistart winner is a floor.
  optim::Options opts;
  opts.max_iters = 200;
  opts.grad_tol = 1e-6;
  auto negated = [&](std::span<const double> x, std::span<double> g) {
    LinearHash h;
    h.v.assign(x.begin(), x.end() - 1);
    h.b = x.back();
    double value = tanh_subproblem_objective(h, u, triplets, ds, g);
    for (auto& gj : g) gj = -gj;
    return -value;
  };
  std::vector<double> x0(start.v.begin(), start.v.end());
  x0.push_back(start.b);
  auto result = optim::minimize_free(negated, std::move(x0), opts);

  LinearHash refined;
  refined.v.assign(result.x.begin(), result.x.end() - 1);
  refined.b = result.x.back();
  return refined;
}

namespace {

struct RegView {
  const TrainConfig& cfg;
  std::span<const double> s;  // duplet split counts, when applicable

  double value(std::span<const double> w) const {
    switch (cfg.reg) {
      case Regularizer::l1: {
        double sum = 0.0;
        for (double wj : w) sum += wj;
        return cfg.C * sum;
      }
      case Regularizer::duplet_weighted_l1: {
        double sum = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) sum += s[j] * w[j];
        return cfg.C * sum;
      }
      case Regularizer::linf: return 0.0;
    }
    return 0.0;
  }

  double gradient(std::size_t j) const {
    switch (cfg.reg) {
      case Regularizer::l1: return cfg.C;
      case Regularizer::duplet_weighted_l1: return cfg.C * s[j];
      case Regularizer::linf: return 0.0;
    }
    return 0.0;
  }
};

}  // namespace

PrimalSolution solve_primal(const AMatrix& A, const TrainConfig& cfg,
                            std::span<const double> warm_start,
                            std::span<const double> duplet_s) {
  const std::size_t ell = A.bits(), nJ = A.cols;
  if (ell == 0) throw ConfigError("primal requires at least one column");
  if (!is_smooth(cfg.loss)) throw ConfigError("primal requires a smooth loss");
  if (cfg.reg == Regularizer::duplet_weighted_l1 && duplet_s.size() != ell)
    throw ConfigError("duplet weights missing for the duplet-weighted regularizer");

  RegView reg{cfg, duplet_s};

  std::vector<double> rho(nJ), dloss(nJ);
  auto objective = [&](std::span<const double> w, std::span<double> grad) {
    std::fill(rho.begin(), rho.end(), 0.0);
    for (std::size_t j = 0; j < ell; ++j)
      kernels::axpy_i8(rho.data(), w[j], A.rows[j].data(), nJ);

    double loss_sum = 0.0;
    for (std::size_t i = 0; i < nJ; ++i) {
      loss_sum += loss_value(cfg.loss, rho[i]);
      dloss[i] = loss_derivative(cfg.loss, rho[i]);
    }
    for (std::size_t j = 0; j < ell; ++j)
      grad[j] = kernels::dot_i8(dloss.data(), A.rows[j].data(), nJ) + reg.gradient(j);
    return loss_sum + reg.value(w);
  };

  std::vector<double> x0(ell, 0.0);
  if (!warm_start.empty()) {
    if (warm_start.size() != ell)
      throw ConfigError("warm start has wrong dimension");
    x0.assign(warm_start.begin(), warm_start.end());
  }

  std::vector<double> lower(ell, 0.0), upper;
  if (cfg.reg == Regularizer::linf) upper.assign(ell, cfg.C_prime);

  optim::Options opts;
  opts.max_iters = cfg.max_primal_iters;
  opts.grad_tol = cfg.primal_tol;
  auto result = optim::minimize(objective, std::move(x0), lower, upper, opts);

  PrimalSolution sol;
  sol.w = std::move(result.x);
  sol.iterations = result.iterations;
  sol.rho.assign(nJ, 0.0);
  for (std::size_t j = 0; j < ell; ++j)
    kernels::axpy_i8(sol.rho.data(), sol.w[j], A.rows[j].data(), nJ);
  double loss_sum = 0.0;
  for (double r : sol.rho) loss_sum += loss_value(cfg.loss, r);
  sol.objective = loss_sum + reg.value(sol.w);
  if (!std::isfinite(sol.objective))
    throw NumericError("primal objective is not finite");
  return sol;
}

std::vector<double> recover_dual(std::span<const double> rho, LossKind loss) {
  std::vector<double> u(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) u[i] = dual_from_margin(loss, rho[i]);
  return u;
}

DualReport check_dual_feasibility(const AMatrix& A, std::span<const double> u,
                                  const TrainConfig& cfg,
                                  std::span<const double> duplet_s,
                                  std::span<const double> w) {
  DualReport report{-std::numeric_limits<double>::infinity(), 0};
  for (std::size_t j = 0; j < A.bits(); ++j) {
    double score = kernels::dot_i8(u.data(), A.rows[j].data(), A.cols);
    double budget = 0.0;
    switch (cfg.reg) {
      case Regularizer::l1: budget = cfg.C; break;
      case Regularizer::duplet_weighted_l1: budget = cfg.C * duplet_s[j]; break;
      case Regularizer::linf:
        // At the box bound the coupled dual variable q_j = max(0, row.u)
        // absorbs the score; elsewhere a positive score is a violation.
        budget = (!w.empty() && w[j] >= cfg.C_prime * (1.0 - 1e-9))
                     ? std::max(0.0, score)
                     : 0.0;
        break;
    }
    double violation = score - budget;
    if (violation > report.max_violation) {
      report.max_violation = violation;
      report.row = j;
    }
  }
  if (A.bits() == 0) report.max_violation = 0.0;
  return report;
}

double duplet_weight(const HashFunction& fn, const DupletSet& duplets,
                     const Dataset& ds) {
  auto bits = hash_bits(fn, ds);
  double count = 0.0;
  for (const auto& [a, b] : duplets.pairs)
    count += std::abs(int(bits[a]) - int(bits[b]));
  return count;
}

std::vector<double> compute_duplet_weights(std::span<const HashFunction> functions,
                                           const DupletSet& duplets,
                                           const Dataset& ds) {
  std::vector<double> s;
  s.reserve(functions.size());
  for (const auto& fn : functions) s.push_back(duplet_weight(fn, duplets, ds));
  return s;
}

HashModel train(const Dataset& ds, std::span<const Triplet> triplets,
                const TrainConfig& cfg, const DupletSet* duplets,
                const TrainObserver& observer) {
  cfg.validate();
  if (triplets.empty()) throw ConfigError("training requires at least one triplet");
  const bool use_duplets = cfg.reg == Regularizer::duplet_weighted_l1;
  if (use_duplets && (duplets == nullptr || duplets->pairs.empty()))
    throw ConfigError("duplet-weighted regularizer requires a non-empty duplet set");

  const std::size_t nJ = triplets.size();
  const double early_tol =
      1e-6 * (cfg.reg == Regularizer::linf ? cfg.C_prime : cfg.C);

  std::vector<double> u(nJ, 1.0 / static_cast<double>(nJ));
  AMatrix A;
  A.cols = nJ;
  std::vector<HashFunction> functions;
  std::vector<double> w, s_weights;

  for (int iter = 1; iter <= cfg.bits; ++iter) {
    HashFunction selected;
    std::vector<std::int8_t> a_row;
    int retries = 0;
    bool duplicate = false;
    for (;;) {
      if (cfg.family == HashFamily::stump) {
        selected = solve_subproblem_stump(u, triplets, ds);
      } else {
        std::uint64_t sub_seed =
            Rng::mix(cfg.seed, (static_cast<std::uint64_t>(iter) << 16) + retries);
        selected = solve_subproblem_linear(u, triplets, ds, cfg.multistart, sub_seed);
      }
      a_row = compute_a_vector(selected, triplets, ds);
      duplicate = std::any_of(A.rows.begin(), A.rows.end(),
                              [&](const auto& row) { return row == a_row; });
      // Stump selection is deterministic, so retrying cannot help there.
      if (!duplicate || cfg.family == HashFamily::stump || retries >= 5) break;
      ++retries;
    }

    double score = kernels::dot_i8(u.data(), a_row.data(), nJ);
    double split_count = use_duplets ? duplet_weight(selected, *duplets, ds) : 0.0;
    double budget = 0.0;
    switch (cfg.reg) {
      case Regularizer::l1: budget = cfg.C; break;
      case Regularizer::duplet_weighted_l1: budget = cfg.C * split_count; break;
      case Regularizer::linf: budget = 0.0; break;
    }
    // The uniform start duals are only a selection heuristic, not a KKT
    // point, so the no-violated-constraint test is meaningful from the
    // second iteration on.
    if (iter > 1 && score <= budget + early_tol) break;

    functions.push_back(selected);
    A.rows.push_back(std::move(a_row));
    if (use_duplets) s_weights.push_back(split_count);

    std::vector<double> u_selection = std::move(u);
    std::vector<double> warm = w;
    warm.push_back(0.0);
    auto sol = solve_primal(A, cfg, warm, s_weights);
    w = sol.w;
    u = recover_dual(sol.rho, cfg.loss);
    auto feas = check_dual_feasibility(A, u, cfg, s_weights, w);

    if (observer) {
      TrainIteration info;
      info.iteration = iter;
      info.selected = selected;
      info.bits = hash_bits(selected, ds);
      info.score = score;
      info.budget = budget;
      info.duplicate_retries = retries;
      info.accepted_duplicate = duplicate;
      info.objective = sol.objective;
      info.kkt_violation = feas.max_violation;
      info.u_selection = std::move(u_selection);
      info.w = w;
      info.rho = sol.rho;
      info.u = u;
      observer(info);
    }

    // A duplicate column cannot change the restricted optimum, so further
    // iterations would only repeat it.
    if (duplicate) break;
  }

  HashModel model;
  model.functions = std::move(functions);
  model.weights = std::move(w);
  if (ds.is_normalized()) {
    model.feature_mean = ds.feature_mean;
    model.feature_std = ds.feature_std;
  } else {
    model.feature_mean.assign(ds.dim, 0.0);
    model.feature_std.assign(ds.dim, 1.0);
  }
  model.config = cfg;
  return model;
}

}  // namespace cghash
