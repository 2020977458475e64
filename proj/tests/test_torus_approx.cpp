#include "tfrunner/torus_approx.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace tfr {
namespace {

const RealBasis kSurds({"1", "sqrt2", "sqrt3"}, {1.0, std::sqrt(2.0), std::sqrt(3.0)});

ExactReal surd(Rational a, Rational b = 0, Rational c = 0) { return ExactReal({a, b, c}); }

ApproxTask exact_task(std::vector<ExactReal> lambdas, std::vector<double> x, double eps, double alpha = 0) {
  return ApproxTask::from_exact({kSurds, std::move(lambdas)}, std::move(x), eps, alpha);
}

void expect_witness(const ApproxTask& task, const ApproxWitness& w) {
  EXPECT_GE(w.t, task.window_start);
  for (std::size_t j = 0; j < task.lambdas.size(); ++j)
    EXPECT_LE(oracle::frac_dist(w.t * task.lambdas[j] - task.targets[j]), task.epsilon) << "component " << j;
  EXPECT_LE(w.achieved_error, task.epsilon);
}

TEST(TorusNorm, Examples) {
  EXPECT_DOUBLE_EQ(torus_norm(0.0), 0.0);
  EXPECT_DOUBLE_EQ(torus_norm(0.75), 0.25);
  EXPECT_NEAR(torus_norm(-1.3), 0.3, 1e-15);
  EXPECT_THROW(torus_norm(std::nan("")), std::invalid_argument);
}

TEST(TorusNorm, AgreesWithOracle) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 10000; ++i) {
    double x = u(rng);
    EXPECT_NEAR(torus_norm(x), oracle::frac_dist(x), 1e-12);
    EXPECT_LE(torus_norm(x), 0.5);
  }
}

TEST(ClassifySequence, Examples) {
  auto good = classify_sequence(exact_task({surd(1), surd(2)}, {0.3, 0.6}, 0.05));
  EXPECT_TRUE(good.good());
  EXPECT_FALSE(good.heuristic);

  auto bad = classify_sequence(exact_task({surd(1), surd(2)}, {0.3, 0.7}, 0.05));
  ASSERT_FALSE(bad.good());
  ASSERT_TRUE(bad.violating_relation.has_value());
  EXPECT_EQ(*bad.violating_relation, (IntVector{2, -1}));
  ASSERT_TRUE(bad.defect.has_value());
  EXPECT_NEAR(*bad.defect, 0.1, 1e-12);

  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 50; ++i)
    EXPECT_TRUE(classify_sequence(exact_task({surd(1), surd(0, 1)}, {u(rng), u(rng)}, 0.05)).good());
}

TEST(ClassifySequence, HeuristicModeIsFlagged) {
  ApproxTask task;
  task.lambdas = {1.0, 2.0};
  task.targets = {0.3, 0.7};
  auto v = classify_sequence(task);
  EXPECT_TRUE(v.heuristic);
  EXPECT_FALSE(v.good());

  task.lambdas = {1.0, std::sqrt(2.0)};
  v = classify_sequence(task);
  EXPECT_TRUE(v.heuristic);
  EXPECT_TRUE(v.good());
}

TEST(ClassifySequence, InvalidTasks) {
  ApproxTask task;
  task.lambdas = {1.0};
  task.targets = {0.1, 0.2};
  EXPECT_THROW(classify_sequence(task), std::invalid_argument);
  task.targets = {0.1};
  task.epsilon = 0.6;
  EXPECT_THROW(classify_sequence(task), std::invalid_argument);
  task.epsilon = 0;
  EXPECT_THROW(classify_sequence(task), std::invalid_argument);
}

TEST(ClassifySequence, InvariantUnderIntegerShiftsOfTargets) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> coef(-3, 3), shift(-5, 5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ExactReal> lam{surd(coef(rng), coef(rng)), surd(coef(rng), coef(rng)), surd(coef(rng))};
    std::vector<double> x{u(rng), u(rng), u(rng)};
    auto base = classify_sequence(exact_task(lam, x, 0.05));
    auto shifted = x;
    for (auto& v : shifted) v += shift(rng);
    auto moved = classify_sequence(exact_task(lam, shifted, 0.05));
    EXPECT_EQ(base.kind, moved.kind);
  }
}

TEST(KroneckerWitness, Examples) {
  auto single = exact_task({surd(1)}, {0.5}, 0.01, 10.0);
  auto w1 = kronecker_witness(single);
  ASSERT_TRUE(w1.has_value());
  expect_witness(single, *w1);
  EXPECT_LT(w1->t, 11.0);

  auto pair = exact_task({surd(1), surd(2)}, {0.3, 0.6}, 0.05);
  auto w2 = kronecker_witness(pair);
  ASSERT_TRUE(w2.has_value());
  expect_witness(pair, *w2);

  auto bad = exact_task({surd(1), surd(2)}, {0.3, 0.7}, 0.05);
  try {
    kronecker_witness(bad);
    FAIL() << "expected BadSequence";
  } catch (const BadSequence& e) {
    EXPECT_EQ(*e.verdict().violating_relation, (IntVector{2, -1}));
  }
}

TEST(KroneckerWitness, IrrationalFrequencies) {
  auto task = exact_task({surd(1), surd(0, 1), surd(0, 0, 1)}, {0.1, 0.7, 0.45}, 0.02);
  auto w = kronecker_witness(task);
  ASSERT_TRUE(w.has_value());
  expect_witness(task, *w);
}

TEST(KroneckerWitness, AlphaLadder) {
  auto task = exact_task({surd(1), surd(0, 1)}, {0.25, 0.6}, 0.03);
  for (double alpha : {0.0, 1.0, 10.0, 100.0, 1000.0, 1e4}) {
    task.window_start = alpha;
    auto w = kronecker_witness(task);
    ASSERT_TRUE(w.has_value()) << "alpha " << alpha;
    expect_witness(task, *w);
  }
}

TEST(KroneckerWitness, FirstHitMatchesPlainGridScan) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 30; ++trial) {
    auto task = exact_task({surd(1), surd(0, 1)}, {u(rng), u(rng)}, 0.05, 3.0 * u(rng));
    auto w = kronecker_witness(task);
    ASSERT_TRUE(w.has_value());
    const double step = task.epsilon / (4.0 * task.lambdas[1]);
    std::int64_t i = 0;
    auto err = [&](double t) {
      return std::max(oracle::frac_dist(t - task.targets[0]), oracle::frac_dist(t * task.lambdas[1] - task.targets[1]));
    };
    while (err(task.window_start + static_cast<double>(i) * step) > task.epsilon) ++i;
    EXPECT_EQ(w->grid_index, i);
  }
}

TEST(KroneckerWitness, RationalFrequenciesNeedOnePeriod) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> num(1, 12), den(1, 6);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const int q = den(rng);
    std::vector<ExactReal> lam{surd(Rational(num(rng), q)), surd(Rational(num(rng), q))};
    // Targets chosen as t0 * lambda so that the sequence is good.
    const double t0 = 10 * u(rng);
    std::vector<double> x{t0 * to_double(lam[0].coeffs()[0]), t0 * to_double(lam[1].coeffs()[0])};
    auto task = exact_task(lam, x, 0.02);
    auto w = kronecker_witness(task);
    ASSERT_TRUE(w.has_value());
    expect_witness(task, *w);
    EXPECT_LE(w->t, static_cast<double>(q) + 1e-9);
  }
}

TEST(KroneckerWitness, BudgetExhaustionIsNotFound) {
  auto task = exact_task({surd(1), surd(0, 1)}, {0.25, 0.6}, 0.001);
  task.scan_budget = 10;
  task.window_start = 0;
  EXPECT_FALSE(kronecker_witness(task).has_value());

  ApproxTask still;
  still.lambdas = {0.0};
  still.targets = {0.3};
  EXPECT_THROW(kronecker_witness(still), BadSequence);
  still.targets = {0.0};
  auto w = kronecker_witness(still);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->t, 0.0);
}

}  // namespace
}  // namespace tfr
