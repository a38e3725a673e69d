#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cghash/dataset.hpp"
#include "cghash/model.hpp"

namespace cghash {

/// Constraint matrix, one row per selected hash function, one column per
/// triplet. Entry (j, i) is |h_j(x_i)-h_j(x_i-)| - |h_j(x_i)-h_j(x_i+)|,
/// always in {-1, 0, +1} for {0,1} bits.
struct AMatrix {
  std::size_t cols = 0;
  std::vector<std::vector<std::int8_t>> rows;

  std::size_t bits() const { return rows.size(); }
};

/// Bit of every sample under h.
std::vector<std::uint8_t> hash_bits(const HashFunction& h, const Dataset& ds);

std::vector<std::int8_t> compute_a_vector(const HashFunction& h,
                                          std::span<const Triplet> triplets,
                                          const Dataset& ds);

/// Sum_i u_i a^[i](h) via absolute bit differences.
double subproblem_score(const HashFunction& h, std::span<const double> u,
                        std::span<const Triplet> triplets, const Dataset& ds);

/// Same score via squared bit differences; exactly equal on binary bits.
double subproblem_score_squared(const HashFunction& h, std::span<const double> u,
                                std::span<const Triplet> triplets,
                                const Dataset& ds);

/// Exhaustive argmax over (feature, threshold, polarity): thresholds at
/// midpoints between consecutive distinct sorted feature values plus one
/// below the minimum, score ties broken by enumeration order (feature
/// ascending, threshold ascending, polarity +1 before -1).
StumpHash solve_subproblem_stump(std::span<const double> u,
                                 std::span<const Triplet> triplets,
                                 const Dataset& ds);

/// Smooth tanh-relaxed subproblem objective. `grad`, when non-empty, must
/// have dim+1 entries and receives d/dv and (last) d/db.
double tanh_subproblem_objective(const LinearHash& h, std::span<const double> u,
                                 std::span<const Triplet> triplets,
                                 const Dataset& ds, std::span<double> grad = {});

/// Best of `multistart` random candidates, refined by quasi-Newton ascent
/// on the tanh objective (gradient infinity norm <= 1e-6 or 200 iterations).
LinearHash solve_subproblem_linear(std::span<const double> u,
                                   std::span<const Triplet> triplets,
                                   const Dataset& ds, int multistart,
                                   std::uint64_t seed);

struct PrimalSolution {
  std::vector<double> w;
  std::vector<double> rho;
  double objective = 0.0;
  int iterations = 0;
};

/// Restricted primal: minimize sum_i f(rho_i) + R(w) over w >= 0 (and
/// w <= Cprime for linf), rho = A^T w. `duplet_s` supplies the per-column
/// split counts for the duplet-weighted regularizer.
PrimalSolution solve_primal(const AMatrix& A, const TrainConfig& cfg,
                            std::span<const double> warm_start = {},
                            std::span<const double> duplet_s = {});

/// u_i = -f'(rho_i), elementwise nonnegative.
std::vector<double> recover_dual(std::span<const double> rho, LossKind loss);

struct DualReport {
  double max_violation = 0.0;
  std::size_t row = 0;
};

/// Max_j (row_j . u - budget_j) over selected rows, where budget_j is C
/// (l1), C*s_j (duplet-weighted l1), or, for linf, 0 except at rows pinned
/// to the Cprime bound whose coupled dual absorbs the excess. A
/// non-positive result certifies that no selected column violates its dual
/// constraint.
DualReport check_dual_feasibility(const AMatrix& A, std::span<const double> u,
                                  const TrainConfig& cfg,
                                  std::span<const double> duplet_s = {},
                                  std::span<const double> w = {});

/// s_j = number of duplets split by hash function j.
std::vector<double> compute_duplet_weights(std::span<const HashFunction> functions,
                                           const DupletSet& duplets,
                                           const Dataset& ds);
double duplet_weight(const HashFunction& fn, const DupletSet& duplets,
                     const Dataset& ds);

/// Snapshot emitted after each column-generation iteration.
struct TrainIteration {
  int iteration = 0;  // 1-based
  HashFunction selected;
  std::vector<std::uint8_t> bits;  // selected function's bit per sample
  double score = 0.0;              // subproblem score of the selected column
  double budget = 0.0;             // dual budget the score was tested against
  int duplicate_retries = 0;
  bool accepted_duplicate = false;
  double objective = 0.0;      // restricted primal objective
  double kkt_violation = 0.0;  // max dual-feasibility violation
  std::vector<double> u_selection;  // duals the subproblem maximized over
  std::vector<double> w, rho, u;    // state after the primal solve
};
using TrainObserver = std::function<void(const TrainIteration&)>;

/// Column generation (duals start uniform at 1/|J|): pick the highest
/// scoring hash function, append its column, re-solve the restricted
/// primal warm-started from the previous weights, recover the duals from
/// the margins, repeat up to cfg.bits columns. Stops early when the best
/// new column no longer violates its dual constraint, or right after
/// accepting an unavoidable duplicate column.
HashModel train(const Dataset& ds, std::span<const Triplet> triplets,
                const TrainConfig& cfg, const DupletSet* duplets = nullptr,
                const TrainObserver& observer = {});

}  // namespace cghash
