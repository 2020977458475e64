#include "tfrunner/gabor.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace tfr {
namespace {

constexpr double kPi = std::numbers::pi;

PointSet counterexample(double a) { return make_points({{0, 0}, {0, -1}, {0, 1}, {a, 0}, {a, -1}, {a, 1}}); }

PointSet random_points(std::mt19937& rng, std::size_t n, double spread, double min_sep) {
  std::uniform_real_distribution<double> u(-spread, spread);
  PointSet ps;
  while (ps.size() < n) {
    TFPoint p{u(rng), u(rng), std::nullopt};
    bool ok = true;
    for (const auto& q : ps.points) ok &= std::hypot(p.tau - q.tau, p.omega - q.omega) >= min_sep;
    if (ok) ps.points.push_back(p);
  }
  return ps;
}

TEST(FunctionModel, Flags) {
  FunctionModel g(Gaussian{0, 1});
  EXPECT_TRUE(g.is_square_integrable());
  EXPECT_TRUE(g.is_ultimately_positive());
  FunctionModel e(OneSidedExpDecay{1, 2, LeftTail::Zero});
  EXPECT_TRUE(e.is_square_integrable());
  EXPECT_EQ(e.positivity_onset(), 1.0);
  EXPECT_EQ(e.half_line_left_edge(), 1.0);
  FunctionModel r(OneSidedExpDecay{1, 2, LeftTail::Ramp});
  EXPECT_TRUE(std::isinf(*r.positivity_onset()));
  EXPECT_FALSE(r.half_line_left_edge().has_value());
  FunctionModel c(TwoPlusCos{});
  EXPECT_FALSE(c.is_square_integrable());
  EXPECT_TRUE(c.is_ultimately_positive());
  FunctionModel x(ExpPure{2, 0.5});
  EXPECT_FALSE(x.is_square_integrable());
  EXPECT_TRUE(x.is_ultimately_positive());
  FunctionModel tab(Tabulated{{0, 1, 2}, {0, 1, 0}});
  EXPECT_FALSE(tab.is_ultimately_positive());
  EXPECT_DOUBLE_EQ(tab(0.5), 0.5);
  EXPECT_DOUBLE_EQ(tab(3), 0.0);
  EXPECT_THROW(FunctionModel(Gaussian{0, 0}), std::invalid_argument);
  EXPECT_THROW(FunctionModel(Tabulated{{0, 0}, {1, 1}}), std::invalid_argument);
}

TEST(FunctionModel, ShiftIsTranslation) {
  FunctionModel h(HalfLine{0.5, HalfLineProfile::Gaussian, 2.0});
  auto s = h.shifted(1.25);
  for (double t = -3; t < 5; t += 0.37) EXPECT_DOUBLE_EQ(s(t), h(t - 1.25));
  EXPECT_EQ(s.positivity_onset(), 1.75);
  EXPECT_EQ(s.half_line_left_edge(), 1.75);
}

TEST(TfShift, Examples) {
  FunctionModel g(Gaussian{0, 1});
  auto grid = uniform_grid(4, 801);
  auto id = tf_shift_eval(g, {0, 0, {}}, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(id[i], Complex(g(grid[i]), 0));

  auto moved = tf_shift_eval(g, {1.5, 0, {}}, grid);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(moved[i].imag(), 0.0);
    if (moved[i].real() > moved[peak].real()) peak = i;
  }
  EXPECT_NEAR(grid[peak], 1.5, 1e-9);

  auto z = tf_shift(FunctionModel(TwoPlusCos{}), {0, 1, {}}, 0.25);
  EXPECT_NEAR(z.real(), 0.0, 1e-12);
  EXPECT_NEAR(z.imag(), 2.0, 1e-12);
}

TEST(GramMatrix, SinglePointIsSquaredNorm) {
  auto G = gram_matrix(FunctionModel(Gaussian{0, 1}), make_points({{0, 0}}));
  ASSERT_EQ(G.rows(), 1);
  EXPECT_NEAR(G(0, 0).real(), std::sqrt(kPi), 1e-9);
  auto s = independence_score(FunctionModel(Gaussian{0, 1}), make_points({{0, 0}}));
  EXPECT_NEAR(s.min_eigenvalue, std::sqrt(kPi), 1e-9);
  EXPECT_FALSE(s.dependent());
}

TEST(GramMatrix, CharactersAreOrthogonal) {
  FunctionModel one(Tabulated{{-16, 16}, {1, 1}});
  auto G = gram_matrix(one, make_points({{0, 0}, {0, 1}}), 16.0, 4097);
  EXPECT_NEAR(std::abs(G(0, 1)), 0.0, 1e-9);
  EXPECT_NEAR(G(0, 0).real(), 32.0, 1e-9);
}

TEST(GramMatrix, AgreesWithSimpsonOracle) {
  FunctionModel g(Gaussian{0.3, 0.7});
  PointSet ps = make_points({{0, 0}, {0.4, 1.1}});
  auto G = gram_matrix(g, ps, 8.0, 4097);
  auto re = [&](double t) { return (std::conj(tf_shift(g, ps[0], t)) * tf_shift(g, ps[1], t)).real(); };
  auto im = [&](double t) { return (std::conj(tf_shift(g, ps[0], t)) * tf_shift(g, ps[1], t)).imag(); };
  EXPECT_NEAR(G(0, 1).real(), oracle::simpson(re, -8, 8, 20000), 1e-9);
  EXPECT_NEAR(G(0, 1).imag(), oracle::simpson(im, -8, 8, 20000), 1e-9);
}

TEST(IndependenceScore, CounterexampleIsDependent) {
  FunctionModel f(TwoPlusCos{});
  for (double a : {0.3, 1 / std::sqrt(2.0), 2.7}) {
    auto s = independence_score(f, counterexample(a));
    ASSERT_TRUE(s.dependent()) << "a = " << a;
    EXPECT_LE(s.min_eigenvalue, 1e-8 * s.trace);
    EXPECT_LE(s.residual, 1e-6);
  }
}

TEST(IndependenceScore, GaussianFourPointSystemsAreIndependent) {
  std::mt19937 rng(21);
  FunctionModel g(Gaussian{0, 0.5});
  for (int trial = 0; trial < 20; ++trial) {
    auto ps = random_points(rng, 4, 2.0, 0.1);
    auto s = independence_score(g, ps);
    EXPECT_GT(s.min_eigenvalue, 1e-6 * s.trace);
    EXPECT_GE(s.min_eigenvalue, -1e-10 * s.trace);
  }
}

TEST(IndependenceScore, NullVectorResidualConsistency) {
  FunctionModel f(TwoPlusCos{});
  auto sys = sample_system(f, counterexample(0.3), 16.0, std::size_t{1} << 14);
  auto s = independence_score(sys);
  ASSERT_TRUE(s.dependent());
  const double bound = std::sqrt(std::max(s.min_eigenvalue, 0.0)) * (1 + 1e-6);
  EXPECT_LE(s.residual, bound + 1e-12);
}

TEST(IndependenceScore, RefinementStability) {
  std::mt19937 rng(22);
  FunctionModel g(Gaussian{0, 0.5});
  for (int trial = 0; trial < 5; ++trial) {
    auto ps = random_points(rng, 4, 2.0, 0.1);
    auto coarse = independence_score(g, ps, 16.0, std::size_t{1} << 13);
    auto fine = independence_score(g, ps, 16.0, std::size_t{1} << 14);
    EXPECT_LE(std::abs(coarse.min_eigenvalue - fine.min_eigenvalue), 0.01 * fine.min_eigenvalue);
  }
}

TEST(IndependenceScore, HalfLineSystemsArePositive) {
  std::mt19937 rng(23);
  FunctionModel h(HalfLine{-2.0, HalfLineProfile::Exponential, 1.0});
  for (int trial = 0; trial < 10; ++trial) {
    auto ps = random_points(rng, 5, 2.0, 0.1);
    auto s = independence_score(h, ps, 24.0, std::size_t{1} << 15);
    EXPECT_GT(s.min_eigenvalue, 0.0);
    EXPECT_FALSE(s.dependent());
  }
}

TEST(NormalizeOrigin, Examples) {
  FunctionModel g(Gaussian{0, 1});
  auto n = normalize_origin(g, make_points({{1, 2}, {3, 4}}));
  EXPECT_EQ(n.origin.tau, 1.0);
  EXPECT_EQ(n.origin.omega, 2.0);
  EXPECT_EQ(n.points[0].tau, 0.0);
  EXPECT_EQ(n.points[0].omega, 0.0);
  EXPECT_EQ(n.points[1].tau, 2.0);
  EXPECT_EQ(n.points[1].omega, 2.0);
  EXPECT_DOUBLE_EQ(n.f.shift(), 1.0);

  auto id = normalize_origin(g, make_points({{0, 0}, {1, 0}, {-1, 3}}));
  EXPECT_EQ(id.origin_index, 0u);
  EXPECT_EQ(id.points[2].tau, -1.0);
  EXPECT_EQ(id.f.shift(), 0.0);

  auto tie = normalize_origin(g, make_points({{2, 0}, {-1, 0}, {0, 1}}));
  EXPECT_EQ(tie.origin.tau, -1.0);
}

TEST(NormalizeOrigin, ScoreInvariance) {
  std::mt19937 rng(24);
  FunctionModel g(Gaussian{0, 0.5});
  for (int trial = 0; trial < 10; ++trial) {
    auto ps = random_points(rng, 4, 2.0, 0.1);
    auto n = normalize_origin(g, ps);
    auto a = independence_score(g, ps);
    auto b = independence_score(n.f, n.points);
    EXPECT_NEAR(a.min_eigenvalue, b.min_eigenvalue, 1e-9 * std::abs(a.min_eigenvalue));
  }
}

TEST(NormalizeOrigin, ExactFrequenciesFollow) {
  RealBasis b({"1", "sqrt2"}, {1.0, std::sqrt(2.0)});
  PointSet ps;
  ps.basis = b;
  ps.points.push_back({0.5, std::sqrt(2.0), ExactReal({0, 1})});
  ps.points.push_back({0.0, 1.0, ExactReal({1, 0})});
  auto n = normalize_origin(FunctionModel(), ps);
  EXPECT_EQ(n.origin_index, 1u);
  EXPECT_EQ(*n.points[0].omega_exact, ExactReal({-1, 1}));
  EXPECT_TRUE(n.points[1].omega_exact->is_zero());
}

TEST(PointSet, DuplicatesRejected) {
  EXPECT_THROW(independence_score(FunctionModel(), make_points({{0, 0}, {0, 0}})), std::invalid_argument);
}

TEST(Metaplectic, Examples) {
  auto ps = make_points({{1, 0}, {0.5, -2}});
  auto same = apply_metaplectic(ps, {{{1, 0}, {0, 1}}});
  EXPECT_EQ(same[1].tau, 0.5);
  EXPECT_EQ(same[1].omega, -2.0);
  auto rot = apply_metaplectic(make_points({{1, 0}}), fourier_rotation());
  EXPECT_EQ(rot[0].tau, 0.0);
  EXPECT_EQ(rot[0].omega, 1.0);
  for (double c : {-3.0, 0.0, 0.7, 12.5}) EXPECT_NO_THROW(apply_metaplectic(ps, {{{1, 0}, {c, 1}}}));
  EXPECT_THROW(apply_metaplectic(ps, {{{2, 0}, {0, 1}}}), DetNotOne);
}

TEST(DependenceResidual, Examples) {
  FunctionModel f(TwoPlusCos{});
  auto ps = counterexample(0.3);
  auto s = independence_score(f, ps);
  ASSERT_TRUE(s.dependent());
  const Complex d0 = (*s.null_vector)(0);
  ASSERT_GT(std::abs(d0), 1e-3);
  std::vector<Complex> c;
  for (Eigen::Index k = 1; k < s.null_vector->size(); ++k) c.push_back(-(*s.null_vector)(k) / d0);
  std::span<const TFPoint> others(ps.points.data() + 1, ps.size() - 1);
  for (double t : {-3.3, 0.0, 0.41, 7.9}) EXPECT_LE(dependence_residual(f, others, c, t), 1e-9);

  std::vector<Complex> zero(others.size(), 0.0);
  EXPECT_DOUBLE_EQ(dependence_residual(f, others, zero, 0.1), f(0.1));

  std::mt19937 rng(25);
  std::normal_distribution<double> nd;
  FunctionModel g(Gaussian{0, 1});
  int positive = 0;
  for (int i = 0; i < 50; ++i) {
    std::vector<Complex> rc(others.size());
    for (auto& z : rc) z = {nd(rng), nd(rng)};
    positive += dependence_residual(g, others, rc, nd(rng)) > 1e-6;
  }
  EXPECT_GE(positive, 49);
}

}  // namespace
}  // namespace tfr
