#include <gtest/gtest.h>

#include <cmath>

#include "sublin/limits.hpp"
#include "sublin/model_io.hpp"

using sublin::Rational;
using sublin::StepSequence;

namespace {

template <class T>
StepSequence<T> load(const char* name) {
  return sublin::parse_step_sequence<T>(sublin::read_text_file(std::string(SUBLIN_CONFIG_DIR "/") + name));
}

}  // namespace

TEST(Schedule, OneTwoFive) {
  EXPECT_EQ(sublin::default_schedule(120), (std::vector<std::size_t>{1, 2, 5, 10, 20, 50, 100, 120}));
  EXPECT_EQ(sublin::default_schedule(100), (std::vector<std::size_t>{1, 2, 5, 10, 20, 50, 100}));
}

TEST(Bounds, MaxAndMinOverTheMeanInterval) {
  const auto b = sublin::lln_bounds([](double x) { return 1 - std::fabs(x - 0.5); }, 0.4, 0.6, 2.0);
  EXPECT_NEAR(b.upper, 1.0, 1e-7);
  EXPECT_NEAR(b.lower, 0.9, 1e-7);
}

TEST(Moments, BernoulliBand) {
  const auto m = sublin::moment_summary(load<Rational>("bernoulli-band.json"), 100);
  EXPECT_EQ(m.mu_bar, Rational(3, 5));
  EXPECT_EQ(m.mu_lo, Rational(2, 5));
  EXPECT_EQ(m.sigma2_bar, Rational(3, 5));
  EXPECT_TRUE(m.tail_abs_decaying);
  EXPECT_TRUE(m.tail_sq_decaying);
}

TEST(Moments, CounterexampleTails) {
  // n V(|X| >= n) = n / (2 n^2) * 2 = 1/n; n V(X^2 >= n) = n / ceil(sqrt n)^2.
  // K = 10^4 covers every k >= n that the suprema need up to n = 10^4.
  const auto set = sublin::counterexample_family<Rational>(10000);
  const auto m = sublin::moment_summary(StepSequence<Rational>({set}), 10000, {10, 16, 17, 100, 101, 10000});
  for (const auto& r : m.rows) {
    EXPECT_EQ(r.tail_abs, Rational(1, static_cast<long>(r.n)));
    const long c = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(r.n))));
    Rational expected(static_cast<long>(r.n), c * c);
    expected.canonicalize();
    EXPECT_EQ(r.tail_sq, expected) << r.n;
  }
  EXPECT_TRUE(m.tail_abs_decaying);
  EXPECT_FALSE(m.tail_sq_decaying);
  EXPECT_EQ(m.sigma2_bar, 1);
  EXPECT_EQ(m.sigma2_lo, 1);
}

TEST(Lln, LinearPhiIsExactlyTheUpperMean) {
  const auto seq = load<Rational>("bernoulli-band.json");
  const auto t = sublin::lln_experiment<Rational>(seq, sublin::PhiExpression::parse("x"), {1, 7, 16, 64});
  for (const auto& r : t.rows()) {
    EXPECT_EQ(r.exact_value, "3/5");
    EXPECT_NEAR(r.prediction, 0.6, 1e-7);
  }
}

TEST(Lln, TentValuesIncreaseTowardOne) {
  const auto seq = load<double>("bernoulli-band.json");
  const auto t = sublin::lln_experiment<double>(seq, sublin::PhiExpression::parse("1-abs(x-0.5)"), {16, 64, 256});
  ASSERT_EQ(t.rows().size(), 3u);
  EXPECT_LT(t.rows()[0].value, t.rows()[1].value);
  EXPECT_LT(t.rows()[1].value, t.rows()[2].value);
  EXPECT_LE(t.rows()[2].value, 1.0);
}

TEST(Lln, WeakLawProbabilityGrows) {
  const auto seq = load<Rational>("bernoulli-band.json");
  const Rational eps(1, 10);
  const Rational a = sublin::weak_lln_check(seq, eps, 10);
  const Rational b = sublin::weak_lln_check(seq, eps, 100);
  EXPECT_LT(a, b);
  EXPECT_LE(b, 1);
}

TEST(Clt, RequiresCenteredSteps) {
  const auto seq = load<double>("bernoulli-band.json");
  try {
    (void)sublin::clt_experiment<double>(seq, sublin::PhiExpression::parse("x"), {4});
    FAIL();
  } catch (const sublin::Error& e) {
    EXPECT_EQ(e.kind(), sublin::ErrorKind::precondition);
  }
}

TEST(Clt, ParametersFromSecondMoments) {
  const auto p = sublin::clt_parameters(load<double>("rademacher.json"));
  EXPECT_DOUBLE_EQ(p.sigma_lo(), 0.5);
  EXPECT_DOUBLE_EQ(p.sigma_hi(), 1.0);
}

TEST(Clt, ExactModeNeedsPerfectSquares) {
  const auto seq = load<Rational>("rademacher.json");
  sublin::CltOptions opts;
  opts.grid.dx = 0.05;
  EXPECT_THROW((void)sublin::clt_experiment<Rational>(seq, sublin::PhiExpression::parse("1-abs(x)"), {5}, opts),
               sublin::Error);
  const auto t = sublin::clt_experiment<Rational>(seq, sublin::PhiExpression::parse("1-abs(x)"), {4}, opts);
  EXPECT_FALSE(t.rows()[0].exact_value.empty());
}

TEST(Clt, TruncationClampsToTheLattice) {
  const auto seq = StepSequence<Rational>({sublin::counterexample_family<Rational>(10)});
  const auto t = sublin::detail::truncate_sqrt(seq, 9);
  for (const auto& m : t[0].members()) {
    for (const auto& a : m.atoms()) EXPECT_LE(abs(a.point), 3);
  }
}

TEST(Counterexample, LlnOneStepClosedForm) {
  // n = 1: value = max_k (1 - 1/k^2) phi(0) + 1/k^2 phi(k^2) with phi = max(1 - x, -1).
  // k = 1 gives 0, k = 2 gives 3/4 + 1/4 * (-1) = 1/2, larger k approach 1.
  const auto r = sublin::prop62_experiment<Rational>(3, 1, Rational(2));
  // k = 3: 8/9 + 1/9 * (-1) = 7/9.
  EXPECT_EQ(r.value, Rational(7, 9));
}

TEST(Counterexample, LlnValueInsideBracket) {
  const auto r = sublin::prop62_experiment<double>(100, 20, 2.0);
  EXPECT_GE(r.value, r.bracket_lo - 1e-12);
  EXPECT_LE(r.value, 1.0 + 1e-12);
  EXPECT_NEAR(r.bracket_lo, 1 - 2 * (1 - std::pow(1 - 1e-4, 20)), 1e-15);
}

TEST(Counterexample, CltOneStepClosedForm) {
  // n = 1, phi = 1 - |x|: k = 1 gives 0, k = 2 gives 3/4 + 1/4 (1 - 2) = 1/2.
  EXPECT_EQ(sublin::prop63_experiment<Rational>(2, 1).value, Rational(1, 2));
  // k = 3: 8/9 + 1/9 (1 - 3) = 2/3.
  EXPECT_EQ(sublin::prop63_experiment<Rational>(3, 1).value, Rational(2, 3));
}

TEST(Counterexample, CltOneStepBoundedTent) {
  // max(1 - |x|, 0): the jump to +-2 costs nothing, so k = 2 gives 3/4.
  EXPECT_EQ(sublin::prop63_experiment<Rational>(2, 1, Rational(0)).value, Rational(3, 4));
  EXPECT_EQ(sublin::prop63_experiment<Rational>(3, 1, Rational(0)).value, Rational(8, 9));
  EXPECT_EQ(sublin::prop63_experiment<Rational>(1, 1, Rational(0)).value, Rational(0));
  EXPECT_THROW((void)sublin::prop63_experiment<Rational>(2, 1, Rational(1)), sublin::Error);
}

TEST(Counterexample, CltClassicalReferences) {
  const auto plain = sublin::prop63_experiment<double>(1, 1);
  EXPECT_NEAR(plain.classical, 1 - std::sqrt(2 / M_PI), 1e-9);
  // E[max(1 - |Z|, 0)] = 2 (Phi(1) - 1/2) - 2 (phi(0) - phi(1)) for standard normal Z.
  const double pdf0 = 1 / std::sqrt(2 * M_PI);
  const double pdf1 = pdf0 * std::exp(-0.5);
  const double expected = std::erf(1 / std::sqrt(2.0)) - 2 * (pdf0 - pdf1);
  EXPECT_NEAR(sublin::prop63_experiment<double>(1, 1, 0.0).classical, expected, 1e-9);
}

TEST(Counterexample, FamilyMoments) {
  EXPECT_NO_THROW((void)sublin::counterexample_family<double>(50));
  EXPECT_THROW((void)sublin::counterexample_family<double>(0), sublin::Error);
}
