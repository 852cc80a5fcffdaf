#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"

using namespace sag;

namespace {

QuadraticCenters toy_centers() {
  Eigen::MatrixXd c(1, 2);
  c << 0.0, 2.0;
  return QuadraticCenters(c, 1.0);
}

TheoryParams unit_params(std::size_t n) {
  TheoryParams t;
  t.n = n;
  t.L = 1.0;
  t.mu = 1.0;
  t.dist0_sq = 1.0;
  t.sigma_sq = 1.0;
  return t;
}

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

Objective random_regularized(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  const Loss loss = seed % 2 == 0 ? Loss::logistic : Loss::squared;
  const double lambda = 0.05 + uniform_unit(rng);
  return Objective(fixtures::random_data(n, p, 1.0, seed, loss), loss, lambda);
}

}  // namespace

TEST(Reference, QuadraticToyMinimizer) {
  const auto sol = reference_solution(fixtures::toy_objective());
  EXPECT_NEAR(sol.x[0], 1.0, 1e-12);
  EXPECT_NEAR(sol.value, 0.5, 1e-15);
  EXPECT_LE(sol.gradient_norm, 1e-12);
}

TEST(Reference, SymmetricLogisticSitsAtOrigin) {
  std::vector<Example> ex;
  ex.push_back({SparseVector({{0, 1.0}, {1, -2.0}}, 2), 1.0});
  ex.push_back({SparseVector({{0, 1.0}, {1, -2.0}}, 2), -1.0});
  const Objective f(share(Dataset(std::move(ex), 2)), Loss::logistic, 0.3);
  ReferenceOptions opts;
  opts.x0 = DenseVector::Constant(2, 3.0);
  const auto sol = reference_solution(f, opts);
  EXPECT_LT(sol.x.norm(), 1e-12);
}

TEST(Reference, StartingAtSolutionIsIdempotent) {
  const Objective f(fixtures::random_data(60, 5, 0.8, 2), Loss::logistic, 0.01);
  const auto first = reference_solution(f);
  ReferenceOptions opts;
  opts.x0 = first.x;
  const auto again = reference_solution(f, opts);
  EXPECT_EQ(again.x, first.x);
  EXPECT_EQ(again.value, first.value);
}

TEST(Reference, MatchesLongFullGradientRun) {
  const Objective f(fixtures::random_data(80, 6, 0.7, 5), Loss::logistic, 0.05);
  const auto sol = reference_solution(f);
  FgState s = FgState::init(DenseVector::Zero(6));
  const double alpha = 1.0 / lipschitz_constant(f).L;
  for (int k = 0; k < 5000; ++k) fg_step(s, f, alpha);
  EXPECT_LT((s.x - sol.x).norm(), 1e-9);
  DenseVector g;
  f.gradient(sol.x, g);
  EXPECT_LE(g.norm(), 1e-12);
  const DenseVector fd = finite_diff_gradient(f, sol.x, 1e-5);
  EXPECT_LT(fd.norm(), 1e-8);
}

TEST(Reference, BudgetIsEnforced) {
  const Objective f(fixtures::random_data(50, 5, 1.0, 1), Loss::logistic, 1e-3);
  ReferenceOptions opts;
  opts.max_passes = 3;
  EXPECT_THROW(reference_solution(f, opts), ReferenceError);
}

TEST(Sigma, QuadraticToyIsOne) {
  EXPECT_DOUBLE_EQ(sigma_sq_at_optimum(fixtures::toy_objective(), DenseVector::Constant(1, 1.0)), 1.0);
}

TEST(Sigma, IdenticalComponentsGiveZero) {
  std::vector<Example> ex(4, Example{SparseVector({{0, 0.5}, {2, 1.0}}, 3), 1.0});
  const Objective f(share(Dataset(std::move(ex), 3)), Loss::logistic, 0.1);
  const auto sol = reference_solution(f);
  EXPECT_LT(sigma_sq_at_optimum(f, sol.x), 1e-20);
  const Objective single(fixtures::single_example(DenseVector::Ones(3), -1.0), Loss::logistic, 0.2);
  EXPECT_LT(sigma_sq_at_optimum(single, reference_solution(single).x), 1e-20);
}

TEST(Sigma, ComponentGradientsSumToZeroAtOptimum) {
  const Objective f = random_regularized(30, 4, 8);
  const auto center = lyapunov_center(f, reference_solution(f).x);
  EXPECT_LT(center.theta.y.rowwise().sum().norm(), 1e-10);
}

TEST(Bounds, SmallStepValues) {
  const TheoryParams t = unit_params(2);
  EXPECT_DOUBLE_EQ(small_step_bound(t, 0), 5.25);
  EXPECT_DOUBLE_EQ(small_step_bound(t, 16), 5.25 * std::pow(15.0 / 16.0, 16));
  EXPECT_NEAR(small_step_bound(t, 16), 1.8694, 1e-4);
  for (std::uint64_t k = 0; k < 500; ++k) EXPECT_LT(small_step_bound(t, k + 1), small_step_bound(t, k));
  TheoryParams flat = t;
  flat.mu = 0.0;
  EXPECT_THROW(small_step_bound(flat, 1), BoundHypothesisError);
}

TEST(Bounds, LargeStepValues) {
  const TheoryParams t = unit_params(8);
  EXPECT_NEAR(large_step_constant(t), 2.0 / 3.0 + (1.0 / 6.0) * (8.0 * std::log(3.0) + 1.0), 1e-15);
  EXPECT_NEAR(large_step_constant(t), 2.29815, 1e-5);
  EXPECT_DOUBLE_EQ(large_step_bound(t, 8), large_step_constant(t) * std::pow(63.0 / 64.0, 8));
  EXPECT_THROW(large_step_bound(unit_params(7), 8), BoundHypothesisError);
  TheoryParams edge = unit_params(16);
  edge.L = 2.0;
  EXPECT_NO_THROW(large_step_bound(edge, 16));
}

TEST(Bounds, AveragedStochasticGradient) {
  TheoryParams t = unit_params(4);
  EXPECT_NEAR(sgd_average_bound(t, 4), 0.5 + std::log(2.0), 1e-15);
  EXPECT_NEAR(sgd_average_bound(t, 4), 1.19315, 1e-5);
  t.sigma_sq = 0.0;
  EXPECT_EQ(sgd_average_bound(t, 7), 2.0 / 7.0);
  t.sigma_sq = 3.0;
  for (std::uint64_t k = 1; k < 10000; ++k) EXPECT_LE(sgd_average_bound(t, k + 1), sgd_average_bound(t, k));
  EXPECT_THROW(sgd_average_bound(t, 0), std::invalid_argument);
}

TEST(Bounds, StepSizes) {
  EXPECT_DOUBLE_EQ(sgd_phase_step(1, 1.0, 1.0), 0.4);
  EXPECT_DOUBLE_EQ(small_step_size(2, 1.0), 0.25);
  EXPECT_DOUBLE_EQ(large_step_size(8, 1.0), 1.0 / 16.0);
}

TEST(Bounds, GeometricRateIsWithinLinearEnvelope) {
  for (std::size_t n : {1, 2, 10, 100, 1000, 100000})
    for (double ratio : {1e-6, 1e-4, 1e-2, 0.1, 0.5, 1.0})
      for (double k = 1; k <= 1e9; k *= 1.7) {
        const double nn = static_cast<double>(n);
        EXPECT_LE(std::pow(1.0 - ratio / (8.0 * nn), k), 8.0 * nn / (k * ratio)) << n << " " << ratio << " " << k;
      }
}

TEST(Bounds, ParamsFromInstance) {
  const Objective f = fixtures::toy_objective();
  const auto t = theory_params(f, {1.0, 1.0}, DenseVector::Zero(1), DenseVector::Constant(1, 1.0), 0.5);
  EXPECT_EQ(t.n, 2u);
  EXPECT_EQ(t.dist0_sq, 1.0);
  EXPECT_EQ(t.sigma_sq, 1.0);
  EXPECT_EQ(t.g_gap0, 0.5);
}

TEST(SgdPhase, SingleComponentReturnsStart) {
  const Objective f(fixtures::single_example(DenseVector::Ones(2), 1.0), Loss::logistic, 0.5);
  const DenseVector x0 = DenseVector::Constant(2, 0.3);
  EXPECT_EQ(sgd_init_phase(f, lipschitz_constant(f), x0, std::uint64_t{4}), x0);
}

TEST(SgdPhase, FixedPointIsKept) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Constant(2, 5, 0.7);
  const QuadraticCenters f(c, 3.0);
  const DenseVector x0 = DenseVector::Constant(2, 0.7);
  EXPECT_EQ(sgd_init_phase(f, f.constants(), x0, std::uint64_t{1}), x0);
}

TEST(SgdPhase, AveragesPreStepIterates) {
  const QuadraticCenters f = toy_centers();
  Rng rng(3);
  std::vector<DenseVector> iterates{DenseVector::Zero(1)};
  std::vector<DenseVector> averages;
  sgd_averaged_run(f, {1.0, 1.0}, iterates[0], 6, rng, [&](std::uint64_t, const DenseVector& a, const DenseVector& x) {
    averages.push_back(a);
    iterates.push_back(x);
  });
  ASSERT_EQ(averages.size(), 6u);
  for (std::size_t k = 1; k <= 6; ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < k; ++i) mean += iterates[i][0];
    EXPECT_NEAR(averages[k - 1][0], mean / static_cast<double>(k), 1e-15);
  }
  // gamma_1 = 0.4 from 0: either 0.4 * 0 (center 0) or 0.4 * 2 (center 2).
  EXPECT_TRUE(iterates[1][0] == 0.0 || iterates[1][0] == 0.8);
}

TEST(SgdPhase, ProtocolCountsFromStochasticPass) {
  const QuadraticCenters f = fixtures::random_centers(8, 2, 1.0, 0);
  Rng rng(1);
  std::vector<std::uint64_t> ks;
  large_step_protocol(f, f.constants(), DenseVector::Zero(2), 20, rng,
                      [&](std::uint64_t k, const DenseVector&) { ks.push_back(k); });
  ASSERT_EQ(ks.size(), 13u);
  EXPECT_EQ(ks.front(), 8u);
  EXPECT_EQ(ks.back(), 20u);
  EXPECT_THROW(large_step_protocol(f, f.constants(), DenseVector::Zero(2), 7, rng, [](std::uint64_t, const DenseVector&) {}),
               std::invalid_argument);
}

TEST(Lyapunov, ZeroAtFixedPoint) {
  const QuadraticCenters toy = toy_centers();
  const auto center = lyapunov_center(toy, toy.minimizer());
  EXPECT_EQ(lyapunov_q(LyapunovSpec::small_step(2, 1.0, 1.0), toy, center.theta, center), 0.0);
  const QuadraticCenters big = fixtures::random_centers(8, 3, 2.0, 4);
  const auto c8 = lyapunov_center(big, big.minimizer());
  const auto large = LyapunovSpec::large_step(8, 2.0, 2.0);
  EXPECT_NEAR(lyapunov_q(large, big, c8.theta, c8), 0.0, 1e-14);
  const auto check = contraction_check(large, big, c8.theta, c8);
  EXPECT_TRUE(check.holds);
  EXPECT_NEAR(check.lhs, 0.0, 1e-14);
}

TEST(Lyapunov, QuadraticToyAtOrigin) {
  const QuadraticCenters toy = toy_centers();
  const auto center = lyapunov_center(toy, toy.minimizer());
  const Theta start{Eigen::MatrixXd::Zero(1, 2), DenseVector::Zero(1)};
  EXPECT_DOUBLE_EQ(lyapunov_q(LyapunovSpec::small_step(2, 1.0, 1.0), toy, start, center), 1.75);
}

TEST(Lyapunov, ZeroMemoryValueMatchesClosedForm) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Objective f = random_regularized(6, 3, seed);
    const auto c = lipschitz_constant(f);
    const auto sol = reference_solution(f);
    const auto center = lyapunov_center(f, sol.x);
    Rng rng(seed);
    const Theta start{Eigen::MatrixXd::Zero(3, 6), fixtures::random_vector(rng, 3, 2.0)};
    const double q = lyapunov_q(LyapunovSpec::small_step(6, c.L, c.mu), f, start, center);
    const double want = 3.0 * sigma_sq_at_optimum(f, sol.x) / (4.0 * c.L * c.L) + (start.x - sol.x).squaredNorm();
    EXPECT_LT(relative_gap(q, want), 1e-12) << seed;
  }
}

TEST(Lyapunov, LargeStepNeedsEnoughComponents) {
  EXPECT_THROW(LyapunovSpec::large_step(7, 1.0, 1.0), BoundHypothesisError);
  EXPECT_NO_THROW(LyapunovSpec::large_step(8, 1.0, 1.0));
  const auto s = LyapunovSpec::large_step(8, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(s.delta, 1.0 / 64.0);
  EXPECT_DOUBLE_EQ(s.nu, 1.0 / 16.0);
  EXPECT_TRUE(s.function_term);
}

TEST(Lemma, ClosedFormMatchesEnumeration) {
  int cases = 0;
  for (std::uint64_t seed = 0; cases < 100; ++seed) {
    const std::size_t n = std::size_t{1} << (seed % 4);
    const std::size_t p = 1 + seed % 4;
    const Objective f = random_regularized(n, p, seed);
    const auto c = lipschitz_constant(f);
    const auto center = lyapunov_center(f, reference_solution(f).x);
    Rng rng(seed + 1000);
    const Theta t = fixtures::random_theta(rng, center.theta, 1.5);
    const auto spec = LyapunovSpec::small_step(n, c.L, c.mu);
    const double closed = expected_next_quadratic(spec, f, t, center);
    const double enumerated = enumerated_next_quadratic(spec, f, t, center);
    EXPECT_LT(relative_gap(closed, enumerated), 1e-10) << "seed " << seed;
    ++cases;
  }
}

TEST(Lemma, LargeStepQuadraticPartMatchesEnumeration) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const QuadraticCenters f = fixtures::random_centers(8, 1 + seed % 4, 1.0 + seed, seed);
    const auto center = lyapunov_center(f, f.minimizer());
    Rng rng(seed);
    const Theta t = fixtures::random_theta(rng, center.theta, 1.0);
    const auto spec = LyapunovSpec::large_step(8, f.curvature(), f.curvature());
    EXPECT_LT(relative_gap(expected_next_quadratic(spec, f, t, center), enumerated_next_quadratic(spec, f, t, center)),
              1e-10);
  }
}

TEST(Lemma, SingleComponentIsDeterministic) {
  const Objective f = random_regularized(1, 3, 4);
  const auto c = lipschitz_constant(f);
  const auto center = lyapunov_center(f, reference_solution(f).x);
  Rng rng(2);
  const Theta t = fixtures::random_theta(rng, center.theta, 1.0);
  const auto spec = LyapunovSpec::small_step(1, c.L, c.mu);
  const double successor = lyapunov_quadratic(spec, sag_successor(f, t, spec.alpha, 0), center);
  EXPECT_LT(relative_gap(expected_next_quadratic(spec, f, t, center), successor), 1e-12);
}

TEST(Contraction, QuadraticToyAtOrigin) {
  const QuadraticCenters toy = toy_centers();
  const auto center = lyapunov_center(toy, toy.minimizer());
  const auto spec = LyapunovSpec::small_step(2, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(spec.alpha, 0.25);
  EXPECT_DOUBLE_EQ(spec.delta, 1.0 / 16.0);
  const auto check = contraction_check(spec, toy, Theta{Eigen::MatrixXd::Zero(1, 2), DenseVector::Zero(1)}, center);
  EXPECT_TRUE(check.holds) << check.lhs << " vs " << check.rhs;
  EXPECT_LT(check.lhs, check.rhs);
}

TEST(Contraction, RandomStatesSmallStep) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t n = std::size_t{2} << (seed % 3);
    const std::size_t p = std::size_t{1} << ((seed / 3) % 3);
    const Objective f = random_regularized(n, p, seed);
    const auto c = lipschitz_constant(f);
    const auto center = lyapunov_center(f, reference_solution(f).x);
    Rng rng(seed);
    const Theta t = fixtures::random_theta(rng, center.theta, 0.1 + 3.0 * uniform_unit(rng));
    const auto check = contraction_check(LyapunovSpec::small_step(n, c.L, c.mu), f, t, center);
    EXPECT_TRUE(check.holds) << "seed " << seed << ": " << check.lhs << " > " << check.rhs;
  }
}

TEST(Contraction, RandomStatesLargeStep) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const QuadraticCenters f = fixtures::random_centers(8, 1 + seed % 4, 0.5 + seed % 5, seed);
    const auto center = lyapunov_center(f, f.minimizer());
    Rng rng(seed);
    const Theta t = fixtures::random_theta(rng, center.theta, 2.0);
    const auto check = contraction_check(LyapunovSpec::large_step(8, f.curvature(), f.curvature()), f, t, center);
    EXPECT_TRUE(check.holds) << "seed " << seed << ": " << check.lhs << " > " << check.rhs;
  }
}

TEST(Domination, SmallStepBoundsDistance) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 2 + seed % 7;
    const Objective f = random_regularized(n, 1 + seed % 4, seed);
    const auto c = lipschitz_constant(f);
    const auto center = lyapunov_center(f, reference_solution(f).x);
    Rng rng(seed);
    const Theta t = fixtures::random_theta(rng, center.theta, 5.0 * uniform_unit(rng));
    const auto check = domination_check(LyapunovSpec::small_step(n, c.L, c.mu), f, t, center, 1e-12);
    EXPECT_TRUE(check.holds) << "seed " << seed;
  }
}

TEST(Domination, LargeStepBoundsFunctionGap) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 8 + seed % 9;
    const QuadraticCenters f = fixtures::random_centers(n, 1 + seed % 4, 1.0, seed);
    const auto center = lyapunov_center(f, f.minimizer());
    Rng rng(seed);
    const Theta t = fixtures::random_theta(rng, center.theta, 3.0);
    const auto check = domination_check(LyapunovSpec::large_step(n, 1.0, 1.0), f, t, center, 1e-10);
    EXPECT_TRUE(check.holds) << "seed " << seed;
  }
}

TEST(Enumeration, CappedAtThirtyTwoComponents) {
  const QuadraticCenters f = fixtures::random_centers(33, 1, 1.0, 0);
  const auto center = lyapunov_center(f, f.minimizer());
  const auto spec = LyapunovSpec::small_step(33, 1.0, 1.0);
  EXPECT_THROW(enumerated_next_quadratic(spec, f, center.theta, center), std::invalid_argument);
  Rng rng(0);
  EXPECT_NEAR(sampled_next_q(spec, f, center.theta, center, 10, rng), 0.0, 1e-14);
}
