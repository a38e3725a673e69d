#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cghash/error.hpp"
#include "cghash/rng.hpp"
#include "cghash/solver.hpp"
#include "support/synthetic.hpp"

using namespace cghash;
using testsupport::make_dataset;

namespace {

// Independent exhaustive stump search used as the selection oracle: its own
// bit logic, threshold set and tie rule (feature asc, threshold asc, +1
// before -1), scores accumulated in triplet order.
StumpHash oracle_best_stump(std::span<const double> u,
                            std::span<const Triplet> triplets, const Dataset& ds) {
  StumpHash best{0, 0.0, +1};
  double best_score = -1e300;
  for (std::size_t d = 0; d < ds.dim; ++d) {
    std::vector<double> vals;
    for (std::size_t m = 0; m < ds.n; ++m) vals.push_back(ds.features[m * ds.dim + d]);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    std::vector<double> thetas = {vals[0] - 1.0};
    for (std::size_t i = 0; i + 1 < vals.size(); ++i)
      thetas.push_back((vals[i] + vals[i + 1]) / 2.0);
    for (double theta : thetas) {
      for (int pol : {+1, -1}) {
        double score = 0.0;
        for (std::size_t i = 0; i < triplets.size(); ++i) {
          auto bit = [&](std::size_t m) {
            bool ge = ds.features[m * ds.dim + d] >= theta;
            return pol > 0 ? (ge ? 1 : 0) : (ge ? 0 : 1);
          };
          int a = std::abs(bit(triplets[i].anchor) - bit(triplets[i].negative)) -
                  std::abs(bit(triplets[i].anchor) - bit(triplets[i].positive));
          score += u[i] * a;
        }
        if (score > best_score) {
          best_score = score;
          best = {d, theta, pol};
        }
      }
    }
  }
  return best;
}

bool same_stump(const StumpHash& a, const StumpHash& b) {
  return a.feature == b.feature && a.threshold == b.threshold && a.polarity == b.polarity;
}

struct Instance {
  Dataset ds;
  std::vector<Triplet> triplets;
};

Instance random_instance(std::uint64_t seed, std::size_t n, std::size_t dim,
                         std::size_t K = 1) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows(n, std::vector<double>(dim));
  std::vector<int> labels(n);
  for (std::size_t m = 0; m < n; ++m) {
    labels[m] = int(m % 2);
    for (auto& v : rows[m]) v = rng.uniform(-2, 2);
  }
  Instance inst;
  inst.ds = normalize(make_dataset(rows, labels));
  inst.triplets = generate_triplets(inst.ds, K, TripletPairing::cross);
  return inst;
}

std::vector<double> random_duals(Rng& rng, std::size_t n) {
  std::vector<double> u(n);
  for (auto& v : u) v = rng.uniform(0.0, 1.0);
  return u;
}

}  // namespace

TEST_CASE("a-vector entries for the three canonical bit patterns") {
  Dataset perfect = make_dataset({{1.0}, {1.0}, {0.0}}, {0, 0, 1});
  Dataset inverted = make_dataset({{1.0}, {0.0}, {1.0}}, {0, 0, 1});
  Dataset uninformative = make_dataset({{1.0}, {1.0}, {1.0}}, {0, 0, 1});
  std::vector<Triplet> t = {{0, 1, 2}};
  HashFunction h = StumpHash{0, 0.5, +1};

  CHECK(compute_a_vector(h, t, perfect) == std::vector<std::int8_t>{1});
  CHECK(compute_a_vector(h, t, inverted) == std::vector<std::int8_t>{-1});
  CHECK(compute_a_vector(h, t, uninformative) == std::vector<std::int8_t>{0});
}

TEST_CASE("subproblem score basics") {
  Dataset perfect = make_dataset({{1.0}, {1.0}, {0.0}}, {0, 0, 1});
  std::vector<Triplet> t = {{0, 1, 2}};
  HashFunction h = StumpHash{0, 0.5, +1};

  std::vector<double> zero = {0.0};
  CHECK(subproblem_score(h, zero, t, perfect) == 0.0);
  std::vector<double> one = {1.0};
  CHECK(subproblem_score(h, one, t, perfect) == 1.0);
}

TEST_CASE("absolute and squared subproblem scores are exactly equal") {
  auto inst = random_instance(12, 8, 2);
  // Trim to 6 triplets as in the stated instance size.
  inst.triplets.resize(std::min<std::size_t>(6, inst.triplets.size()));
  Rng rng(55);
  auto u = random_duals(rng, inst.triplets.size());
  for (int k = 0; k < 100; ++k) {
    StumpHash h{std::size_t(rng.next_u64() % inst.ds.dim), rng.uniform(-2, 2),
                rng.uniform01() < 0.5 ? +1 : -1};
    double abs_form = subproblem_score(h, u, inst.triplets, inst.ds);
    double sq_form = subproblem_score_squared(h, u, inst.triplets, inst.ds);
    CHECK(abs_form == sq_form);  // exact, not approximate
  }
}

TEST_CASE("stump subproblem solves the 1-D fixture") {
  Dataset ds = make_dataset({{0.0}, {1.0}, {2.0}}, {0, 0, 1});
  std::vector<Triplet> t = {{1, 0, 2}};
  std::vector<double> u = {1.0};

  StumpHash got = solve_subproblem_stump(u, t, ds);
  CHECK(got.feature == 0);
  CHECK(got.threshold == doctest::Approx(1.5));
  CHECK(subproblem_score(HashFunction{got}, u, t, ds) == 1.0);
  CHECK(same_stump(got, oracle_best_stump(u, t, ds)));
}

TEST_CASE("stump subproblem under total tie returns the first candidate") {
  Dataset ds = make_dataset({{0.0, 3.0}, {1.0, 4.0}, {2.0, 5.0}}, {0, 0, 1});
  std::vector<Triplet> t = {{1, 0, 2}};
  std::vector<double> u = {0.0};

  StumpHash got = solve_subproblem_stump(u, t, ds);
  CHECK(got.feature == 0);
  CHECK(got.threshold == doctest::Approx(-1.0));  // one threshold below the minimum
  CHECK(got.polarity == +1);
  CHECK(same_stump(got, oracle_best_stump(u, t, ds)));
}

TEST_CASE("stump subproblem equals the oracle on random instances") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    auto inst = random_instance(100 + seed, 10, 3);
    Rng rng(seed * 17 + 3);
    auto u = random_duals(rng, inst.triplets.size());

    StumpHash got = solve_subproblem_stump(u, inst.triplets, inst.ds);
    StumpHash want = oracle_best_stump(u, inst.triplets, inst.ds);
    CHECK(same_stump(got, want));

    // Argmax property: no enumerated candidate scores higher.
    double got_score = subproblem_score(HashFunction{got}, u, inst.triplets, inst.ds);
    for (std::size_t d = 0; d < inst.ds.dim; ++d) {
      for (std::size_t m = 0; m < inst.ds.n; ++m) {
        StumpHash c{d, inst.ds.features[m * inst.ds.dim + d] - 1e-9, +1};
        CHECK(subproblem_score(HashFunction{c}, u, inst.triplets, inst.ds) <=
              got_score + 1e-15);
      }
    }
  }
}

TEST_CASE("stump subproblem handles duplicated feature values") {
  // Repeated values must collapse to one threshold slot each; the
  // enumeration still finds the split between the two value groups.
  Dataset ds = make_dataset({{0.0}, {0.0}, {0.0}, {1.0}, {1.0}}, {0, 0, 0, 1, 1});
  std::vector<Triplet> t = {{0, 1, 3}, {1, 2, 4}, {3, 4, 0}};
  std::vector<double> u = {1.0, 1.0, 1.0};

  StumpHash got = solve_subproblem_stump(u, t, ds);
  CHECK(got.threshold == doctest::Approx(0.5));
  CHECK(subproblem_score(HashFunction{got}, u, t, ds) == 3.0);
  CHECK(same_stump(got, oracle_best_stump(u, t, ds)));
}

TEST_CASE("tanh subproblem gradient matches central finite differences") {
  auto inst = random_instance(7, 9, 3);
  Rng rng(91);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    auto u = random_duals(rng, inst.triplets.size());
    LinearHash lin;
    lin.v = {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
    lin.b = rng.uniform(-1, 1);

    std::vector<double> grad(inst.ds.dim + 1);
    tanh_subproblem_objective(lin, u, inst.triplets, inst.ds, grad);

    for (std::size_t j = 0; j <= inst.ds.dim; ++j) {
      LinearHash hp = lin, hm = lin;
      if (j < inst.ds.dim) {
        hp.v[j] += h;
        hm.v[j] -= h;
      } else {
        hp.b += h;
        hm.b -= h;
      }
      double fd = (tanh_subproblem_objective(hp, u, inst.triplets, inst.ds) -
                   tanh_subproblem_objective(hm, u, inst.triplets, inst.ds)) /
                  (2 * h);
      CHECK(std::abs(grad[j] - fd) <= 1e-5 * (1.0 + std::abs(grad[j])));
    }
  }
}

TEST_CASE("linear subproblem with zero duals returns the first candidate") {
  auto inst = random_instance(21, 8, 2);
  std::vector<double> u(inst.triplets.size(), 0.0);
  LinearHash got = solve_subproblem_linear(u, inst.triplets, inst.ds, 5, 999);
  LinearHash first = lsh_sample(inst.ds.dim, 5, 999)[0];
  CHECK(got.v == first.v);
  CHECK(got.b == first.b);
}

TEST_CASE("linear subproblem refinement never loses to its start") {
  auto inst = random_instance(31, 10, 2, 2);
  Rng rng(13);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto u = random_duals(rng, inst.triplets.size());
    auto candidates = lsh_sample(inst.ds.dim, 8, seed);
    double best_initial = -1e300;
    for (const auto& c : candidates)
      best_initial =
          std::max(best_initial, tanh_subproblem_objective(c, u, inst.triplets, inst.ds));

    LinearHash refined = solve_subproblem_linear(u, inst.triplets, inst.ds, 8, seed);
    double refined_obj = tanh_subproblem_objective(refined, u, inst.triplets, inst.ds);
    CHECK(refined_obj >= best_initial - 1e-12);
  }
}

TEST_CASE("single-column primal matches the 1-D oracle") {
  AMatrix A;
  A.cols = 1;
  A.rows = {{1}};
  TrainConfig cfg;
  cfg.loss = LossKind::squared_hinge;
  cfg.reg = Regularizer::l1;
  cfg.C = 0.1;

  auto sol = solve_primal(A, cfg);
  REQUIRE(sol.w.size() == 1);
  CHECK(sol.w[0] == doctest::Approx(0.95).epsilon(1e-6));
  CHECK(sol.objective == doctest::Approx(0.0975).epsilon(1e-9));
  CHECK(sol.rho[0] == doctest::Approx(0.95).epsilon(1e-6));

  cfg.C = 2.0;  // gradient at 0 is -2 + C >= 0: stays at the bound
  auto zero = solve_primal(A, cfg);
  CHECK(zero.w[0] == 0.0);
  cfg.C = 3.5;
  CHECK(solve_primal(A, cfg).w[0] == 0.0);
}

TEST_CASE("primal never exceeds its warm start objective") {
  Rng rng(207);
  for (int trial = 0; trial < 10; ++trial) {
    AMatrix A;
    A.cols = 12;
    for (int j = 0; j < 4; ++j) {
      std::vector<std::int8_t> row(A.cols);
      for (auto& e : row) e = std::int8_t(int(rng.next_u64() % 3) - 1);
      A.rows.push_back(row);
    }
    TrainConfig cfg;
    cfg.C = 0.3;

    std::vector<double> warm(4);
    for (auto& v : warm) v = rng.uniform(0.0, 2.0);

    // Objective at the warm start itself.
    std::vector<double> rho(A.cols, 0.0);
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t i = 0; i < A.cols; ++i) rho[i] += warm[j] * A.rows[j][i];
    double warm_obj = 0.0;
    for (double r : rho) warm_obj += loss_value(cfg.loss, r);
    for (double wj : warm) warm_obj += cfg.C * wj;

    auto sol = solve_primal(A, cfg, warm);
    CHECK(sol.objective <= warm_obj + 1e-12);
  }
}

TEST_CASE("a dominated column gets zero weight and satisfies the dual budget strictly") {
  // Column 2 covers every triplet column 1 covers, plus one more; with any
  // C > 0 all mass goes to column 2. Analytically: w = (0, 1 - C/4),
  // u = (C/2, C/2), so row 1 scores C/2 < C (inactive, strict) and row 2
  // sits exactly on the budget.
  AMatrix A;
  A.cols = 2;
  A.rows = {{1, 0}, {1, 1}};
  TrainConfig cfg;
  cfg.C = 0.4;

  auto sol = solve_primal(A, cfg);
  CHECK(sol.w[0] <= 1e-6);
  CHECK(sol.w[1] == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(sol.objective == doctest::Approx(0.38).epsilon(1e-9));

  auto u = recover_dual(sol.rho, cfg.loss);
  double dot_r1 = u[0];
  double dot_r2 = u[0] + u[1];
  CHECK(dot_r1 == doctest::Approx(0.2).epsilon(1e-5));  // inactive: below budget
  CHECK(dot_r2 == doctest::Approx(0.4).epsilon(1e-5));  // active: on the budget
  CHECK(check_dual_feasibility(A, u, cfg).max_violation <= 1e-5);
}

TEST_CASE("all-zero duplet weights reproduce the unregularized solution") {
  auto inst = random_instance(77, 10, 2);
  AMatrix A;
  A.cols = inst.triplets.size();
  std::vector<HashFunction> fns = {StumpHash{0, 0.0, +1}, StumpHash{1, 0.2, +1},
                                   StumpHash{0, -0.4, -1}};
  for (const auto& f : fns) A.rows.push_back(compute_a_vector(f, inst.triplets, inst.ds));

  TrainConfig duplet_cfg;
  duplet_cfg.reg = Regularizer::duplet_weighted_l1;
  duplet_cfg.C = 5.0;
  std::vector<double> zero_s(A.bits(), 0.0);
  auto via_duplet = solve_primal(A, duplet_cfg, {}, zero_s);

  TrainConfig free_cfg;
  free_cfg.reg = Regularizer::l1;
  free_cfg.C = 0.0;  // unregularized reference
  auto via_l1 = solve_primal(A, free_cfg);

  CHECK(via_duplet.objective == doctest::Approx(via_l1.objective).epsilon(1e-7));
  for (std::size_t j = 0; j < A.bits(); ++j)
    CHECK(via_duplet.w[j] == doctest::Approx(via_l1.w[j]).epsilon(1e-4));
}

TEST_CASE("recover_dual maps margins through the loss gradient") {
  std::vector<double> rho = {1.0, 1.0};
  CHECK(recover_dual(rho, LossKind::squared_hinge) == std::vector<double>{0.0, 0.0});
  std::vector<double> zero = {0.0};
  CHECK(recover_dual(zero, LossKind::squared_hinge) == std::vector<double>{2.0});
  CHECK(recover_dual(zero, LossKind::logistic)[0] == doctest::Approx(0.5));
}

TEST_CASE("dual feasibility report at the stated points") {
  AMatrix A;
  A.cols = 2;
  A.rows = {{1, 1}};
  TrainConfig cfg;
  cfg.C = 0.8;

  std::vector<double> zero = {0.0, 0.0};
  auto rep = check_dual_feasibility(A, zero, cfg);
  CHECK(rep.max_violation == doctest::Approx(-0.8));

  std::vector<double> boundary = {0.4, 0.4};
  CHECK(check_dual_feasibility(A, boundary, cfg).max_violation == 0.0);
}

TEST_CASE("KKT stationarity holds after every primal solve") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto inst = random_instance(300 + seed, 12, 3, 2);
    TrainConfig cfg;
    cfg.bits = 4;
    cfg.family = HashFamily::stump;
    cfg.C = 0.4;

    // Rebuild each column's a-row from the reported per-sample bits,
    // independently of the solver's bookkeeping.
    std::vector<std::vector<int>> rows;
    train(inst.ds, inst.triplets, cfg, nullptr, [&](const TrainIteration& it) {
      std::vector<int> row(inst.triplets.size());
      for (std::size_t i = 0; i < inst.triplets.size(); ++i) {
        const Triplet& t = inst.triplets[i];
        row[i] = std::abs(int(it.bits[t.anchor]) - int(it.bits[t.negative])) -
                 std::abs(int(it.bits[t.anchor]) - int(it.bits[t.positive]));
      }
      rows.push_back(std::move(row));

      REQUIRE(it.w.size() == rows.size());
      for (std::size_t j = 0; j < rows.size(); ++j) {
        double dual_score = 0.0;
        for (std::size_t i = 0; i < inst.triplets.size(); ++i)
          dual_score += it.u[i] * rows[j][i];
        if (it.w[j] > 1e-6)
          CHECK(std::abs(dual_score - cfg.C) <= 1e-4);  // active: on the budget
        else
          CHECK(dual_score <= cfg.C + 1e-4);  // inactive: within it
      }
      CHECK(it.kkt_violation <= 1e-4);
      for (double uv : it.u) CHECK(uv >= 0.0);
    });
  }
}

TEST_CASE("duplet weights count split pairs") {
  Dataset ds = make_dataset({{0.0}, {1.0}, {2.0}, {3.0}, {4.0}, {5.0}}, {0, 0, 0, 0, 0, 1});
  DupletSet duplets;
  duplets.pairs = {{0, 1}, {1, 2}, {2, 3}, {3, 4}};

  HashFunction agrees = StumpHash{0, -10.0, +1};  // every bit 1
  CHECK(duplet_weight(agrees, duplets, ds) == 0.0);

  HashFunction splitter = StumpHash{0, 2.5, +1};  // bits 0,0,0,1,1,1
  CHECK(duplet_weight(splitter, duplets, ds) == 1.0);

  HashFunction mid = StumpHash{0, 1.5, +1};
  auto s = compute_duplet_weights(std::vector<HashFunction>{agrees, splitter, mid},
                                  duplets, ds);
  CHECK(s == std::vector<double>{0.0, 1.0, 1.0});

  // Five pairs, three of them straddling the threshold.
  DupletSet five;
  five.pairs = {{0, 3}, {1, 4}, {2, 5}, {0, 1}, {3, 4}};
  HashFunction three_of_five = StumpHash{0, 2.5, +1};  // bits 0,0,0,1,1,1
  CHECK(duplet_weight(three_of_five, five, ds) == 3.0);
}

TEST_CASE("train composes the subproblem and primal oracles on one triplet") {
  Dataset ds = make_dataset({{0.0}, {1.0}, {2.0}}, {0, 0, 1});
  std::vector<Triplet> t = {{1, 0, 2}};
  TrainConfig cfg;
  cfg.bits = 1;
  cfg.family = HashFamily::stump;
  cfg.C = 0.1;

  HashModel model = train(ds, t, cfg);
  REQUIRE(model.bits() == 1);
  const auto& stump = std::get<StumpHash>(model.functions[0]);
  CHECK(stump.feature == 0);
  CHECK(stump.threshold == doctest::Approx(1.5));
  CHECK(model.weights[0] == doctest::Approx(0.95).epsilon(1e-6));

  // Requesting more bits changes nothing: the dual budget is met already.
  cfg.bits = 4;
  HashModel more = train(ds, t, cfg);
  CHECK(more.bits() == 1);
}

TEST_CASE("train separates two clusters within 4 stump bits") {
  Dataset ds = normalize(make_dataset({{0.0, 0.1}, {0.1, 0.0}, {0.2, 0.2}, {0.05, 0.15},
                                       {5.0, 5.1}, {5.1, 5.0}, {5.2, 5.2}, {5.05, 5.15}},
                                      {0, 0, 0, 0, 1, 1, 1, 1}));
  auto triplets = generate_triplets(ds, 2, TripletPairing::cross);
  TrainConfig cfg;
  cfg.bits = 4;
  cfg.family = HashFamily::stump;
  cfg.C = 0.01;

  HashModel model = train(ds, triplets, cfg);
  REQUIRE(model.bits() >= 1);

  std::size_t satisfied = 0;
  for (const auto& t : triplets) {
    double rho = 0.0;
    for (std::size_t j = 0; j < model.bits(); ++j) {
      auto a = compute_a_vector(model.functions[j], std::vector<Triplet>{t}, ds);
      rho += model.weights[j] * a[0];
    }
    if (rho > 0) ++satisfied;
  }
  CHECK(satisfied == triplets.size());
}

TEST_CASE("training objective is monotone and columns match the stump oracle") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto inst = random_instance(500 + seed, 11, 2, 2);
    TrainConfig cfg;
    cfg.bits = 3;
    cfg.family = HashFamily::stump;
    cfg.C = 0.3;

    double prev = 1e300;
    train(inst.ds, inst.triplets, cfg, nullptr, [&](const TrainIteration& it) {
      CHECK(it.objective <= prev + 1e-8);
      prev = it.objective;
      StumpHash want = oracle_best_stump(it.u_selection, inst.triplets, inst.ds);
      CHECK(same_stump(std::get<StumpHash>(it.selected), want));
    });
  }
}

TEST_CASE("train stops early once every triplet is satisfied") {
  Dataset ds = make_dataset({{0.0}, {0.2}, {5.0}, {5.2}}, {0, 0, 1, 1});
  auto triplets = generate_triplets(ds, 1, TripletPairing::cross);
  TrainConfig cfg;
  cfg.bits = 32;
  cfg.family = HashFamily::stump;
  cfg.C = 0.001;

  std::vector<double> last_u;
  HashModel model =
      train(ds, triplets, cfg, nullptr,
            [&](const TrainIteration& it) { last_u = it.u; });
  CHECK(model.bits() < 32);

  // Squared hinge: u vanishes once every margin clears 1.
  bool all_satisfied = true;
  for (double uv : last_u) all_satisfied = all_satisfied && uv <= 2 * cfg.C + 1e-9;
  CHECK(all_satisfied);
}

TEST_CASE("linf regularizer caps weights at Cprime") {
  AMatrix A;
  A.cols = 1;
  A.rows = {{1}};
  TrainConfig cfg;
  cfg.reg = Regularizer::linf;
  cfg.C_prime = 0.5;

  // Unregularized optimum would be w = 1; the box stops it at 0.5.
  auto sol = solve_primal(A, cfg);
  CHECK(sol.w[0] == doctest::Approx(0.5));
  CHECK(sol.objective == doctest::Approx(0.25));  // (1 - 0.5)^2

  // At the bound the coupled dual absorbs the positive score.
  auto u = recover_dual(sol.rho, cfg.loss);
  auto rep = check_dual_feasibility(A, u, cfg, {}, sol.w);
  CHECK(rep.max_violation <= 1e-6);

  // The same row below the bound is a genuine violation.
  std::vector<double> interior_w = {0.4};
  auto viol = check_dual_feasibility(A, u, cfg, {}, interior_w);
  CHECK(viol.max_violation == doctest::Approx(1.0));  // u = 2*(1-0.5)
}

TEST_CASE("train works with the linf regularizer end to end") {
  auto inst = random_instance(811, 10, 2, 2);
  TrainConfig cfg;
  cfg.bits = 3;
  cfg.family = HashFamily::stump;
  cfg.reg = Regularizer::linf;
  cfg.C_prime = 0.4;

  double prev = 1e300;
  HashModel model = train(inst.ds, inst.triplets, cfg, nullptr,
                          [&](const TrainIteration& it) {
                            CHECK(it.objective <= prev + 1e-8);
                            prev = it.objective;
                            for (double w : it.w) {
                              CHECK(w >= 0.0);
                              CHECK(w <= cfg.C_prime + 1e-9);
                            }
                          });
  CHECK(model.bits() >= 1);
}

TEST_CASE("train works with the duplet-weighted regularizer end to end") {
  Dataset ds = normalize(testsupport::four_clusters(5, 61));
  auto triplets = generate_triplets(ds, 2, TripletPairing::cross);
  auto duplets = generate_duplets(ds, 2);
  REQUIRE(!duplets.pairs.empty());

  TrainConfig cfg;
  cfg.bits = 4;
  cfg.family = HashFamily::stump;
  cfg.reg = Regularizer::duplet_weighted_l1;
  cfg.C = 0.02;

  double prev = 1e300;
  HashModel model = train(ds, triplets, cfg, &duplets, [&](const TrainIteration& it) {
    CHECK(it.objective <= prev + 1e-8);
    prev = it.objective;
    CHECK(it.kkt_violation <= 1e-4);
  });
  CHECK(model.bits() >= 1);
  for (double w : model.weights) CHECK(w >= 0.0);
}

TEST_CASE("train supports the logistic and exponential losses") {
  for (LossKind kind : {LossKind::logistic, LossKind::exponential}) {
    Dataset ds = make_dataset({{0.0}, {1.0}, {2.0}}, {0, 0, 1});
    std::vector<Triplet> t = {{1, 0, 2}};
    TrainConfig cfg;
    cfg.bits = 2;
    cfg.family = HashFamily::stump;
    cfg.loss = kind;
    cfg.C = 0.05;

    HashModel model = train(ds, t, cfg, nullptr, [&](const TrainIteration& it) {
      CHECK(it.kkt_violation <= 1e-4);
      for (double uv : it.u) CHECK(uv >= 0.0);
    });
    REQUIRE(model.bits() >= 1);
    // The margin-improving stump is the same whatever the monotone loss.
    CHECK(std::get<StumpHash>(model.functions[0]).threshold == doctest::Approx(1.5));
  }
}

TEST_CASE("encoding the training set reproduces the bits the solver used") {
  Dataset raw = testsupport::four_clusters(5, 8);
  Dataset ds = normalize(raw);
  auto triplets = generate_triplets(ds, 2, TripletPairing::cross);
  TrainConfig cfg;
  cfg.bits = 5;
  cfg.family = HashFamily::stump;
  cfg.C = 0.05;

  std::vector<std::vector<std::uint8_t>> solver_bits;
  HashModel model = train(ds, triplets, cfg, nullptr, [&](const TrainIteration& it) {
    solver_bits.push_back(it.bits);
  });
  REQUIRE(solver_bits.size() == model.bits());

  // Same path a consumer takes: raw data, the model's stored statistics.
  Dataset renorm = apply_normalization(raw, model.feature_mean, model.feature_std);
  for (std::size_t m = 0; m < renorm.n; ++m) {
    BitCode code = encode(model.functions, renorm.row(m));
    for (std::size_t j = 0; j < model.bits(); ++j)
      CHECK(code.get(j) == int(solver_bits[j][m]));
  }
}

TEST_CASE("linear-family training separates clusters in 8 dimensions") {
  // Two clusters offset along every axis; exercises the kernel vector
  // bodies through the whole training path.
  Rng rng(4096);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int m = 0; m < 24; ++m) {
    int label = m % 2;
    std::vector<double> row(8);
    for (auto& v : row) v = (label ? 1.5 : -1.5) + rng.normal();
    rows.push_back(std::move(row));
    labels.push_back(label);
  }
  Dataset ds = normalize(make_dataset(rows, labels));
  auto triplets = generate_triplets(ds, 3, TripletPairing::cross);

  TrainConfig cfg;
  cfg.bits = 6;
  cfg.family = HashFamily::linear;
  cfg.C = 0.5;
  cfg.multistart = 6;
  cfg.seed = 9;

  double prev = 1e300;
  HashModel model = train(ds, triplets, cfg, nullptr, [&](const TrainIteration& it) {
    CHECK(it.objective <= prev + 1e-8);
    prev = it.objective;
    CHECK(it.kkt_violation <= 1e-4);
  });
  REQUIRE(model.bits() >= 1);

  std::size_t satisfied = 0;
  AMatrix A;
  A.cols = triplets.size();
  for (const auto& fn : model.functions)
    A.rows.push_back(compute_a_vector(fn, triplets, ds));
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    double rho = 0.0;
    for (std::size_t j = 0; j < model.bits(); ++j)
      rho += model.weights[j] * A.rows[j][i];
    if (rho > 0) ++satisfied;
  }
  CHECK(double(satisfied) / double(triplets.size()) > 0.95);
}

TEST_CASE("train validates its configuration") {
  Dataset ds = make_dataset({{0.0}, {1.0}, {2.0}}, {0, 0, 1});
  std::vector<Triplet> t = {{1, 0, 2}};

  TrainConfig bad;
  bad.C = -1.0;
  CHECK_THROWS_AS(train(ds, t, bad), ConfigError);

  TrainConfig hinge;
  hinge.loss = LossKind::hinge;
  CHECK_THROWS_AS(train(ds, t, hinge), ConfigError);

  TrainConfig ok;
  CHECK_THROWS_AS(train(ds, {}, ok), ConfigError);

  TrainConfig duplet;
  duplet.reg = Regularizer::duplet_weighted_l1;
  CHECK_THROWS_AS(train(ds, t, duplet), ConfigError);
}
