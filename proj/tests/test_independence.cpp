#include <gtest/gtest.h>

#include <string>

#include "sublin/independence.hpp"
#include "sublin/model_io.hpp"

using sublin::JointModel;
using sublin::Rational;

namespace {

JointModel<Rational> example() {
  return sublin::parse_joint_model<Rational>(sublin::read_text_file(SUBLIN_CONFIG_DIR "/example36.json"));
}

// phi*(x, y) = 1 on the diagonal, 0 off it.
sublin::Probe<Rational> diagonal() {
  return {"diagonal", [](std::span<const Rational> x) { return x[0] == x[1] ? Rational(1) : Rational(0); }};
}

}  // namespace

TEST(JointModel, MarginalsAndConditionals) {
  const auto m = example();
  EXPECT_EQ(m.marginal(0, 0), (std::vector<Rational>{Rational(1, 4), Rational(3, 4)}));
  EXPECT_EQ(m.marginal(0, 1), (std::vector<Rational>{Rational(1, 4), Rational(3, 4)}));
  const std::vector<Rational> x0 = {0};
  auto id = [](const Rational& y) { return y; };
  EXPECT_EQ(sublin::conditional_expectation<Rational>(m, 0, id, x0), Rational(3, 4));
  EXPECT_EQ(sublin::conditional_expectation<Rational>(m, 1, id, x0), Rational(1, 2));
}

TEST(JointModel, NullHistoryIsReported) {
  JointModel<Rational> m({"X", "Y"}, {{0, 1}, {0, 1}}, {{Rational(1, 2), Rational(1, 2), 0, 0}});
  const std::vector<Rational> x1 = {1};
  EXPECT_THROW((void)sublin::conditional_expectation<Rational>(m, 0, [](const Rational& y) { return y; }, x1),
               sublin::Error);
}

TEST(JointModel, RejectsBadTables) {
  EXPECT_THROW(JointModel<Rational>({"X"}, {{0, 1}}, {{Rational(1, 2)}}), sublin::Error);
  EXPECT_THROW(JointModel<Rational>({"X"}, {{0, 1}}, {{Rational(1, 2), Rational(1, 3)}}), sublin::Error);
  EXPECT_THROW(JointModel<Rational>({"X"}, {{0, 0}}, {{Rational(1, 2), Rational(1, 2)}}), sublin::Error);
}

TEST(Example, PseudoIndependent) {
  const auto r = sublin::check_pseudo_independence(example(), 2);
  EXPECT_TRUE(r.verdict);
  EXPECT_EQ(r.gap, 0);
}

TEST(Example, ProbeSidesAreFiveEighthsAndElevenSixteenths) {
  const auto m = example();
  const auto o = sublin::evaluate_probe(m, 2, diagonal());
  EXPECT_EQ(o.lhs, Rational(5, 8));
  EXPECT_EQ(o.rhs, Rational(11, 16));
  const auto r = sublin::check_peng_independence(m, 2, {}, {diagonal()});
  EXPECT_FALSE(r.verdict);
  EXPECT_TRUE(r.definitive);
  EXPECT_EQ(r.gap, Rational(1, 16));
}

TEST(Example, DefaultProbesRefuteToo) {
  const auto r = sublin::check_peng_independence(example(), 2);
  EXPECT_FALSE(r.verdict);
  EXPECT_GT(r.gap, 0);
}

TEST(Example, ExactModeRefutes) {
  sublin::PengOptions opts;
  opts.mode = sublin::PengMode::exact;
  const auto r = sublin::check_peng_independence(example(), 2, opts);
  EXPECT_FALSE(r.verdict);
  EXPECT_TRUE(r.definitive);
  ASSERT_TRUE(r.witness.has_value());
}

TEST(Example, EnlargementContainsPStar) {
  const auto v = sublin::enlarge_vertices(example());
  EXPECT_EQ(v.num_measures(), 8u);
  // Rows X = 0 then X = 1; columns Y = 0, 1.
  const std::vector<Rational> p_star = {Rational(1, 8), Rational(1, 8), Rational(3, 16), Rational(9, 16)};
  bool found = false;
  for (const auto& t : v.tables()) found = found || t == p_star;
  EXPECT_TRUE(found);
  // Under the enlargement both sides coincide at 11/16.
  const auto o = sublin::evaluate_probe(v, 2, diagonal());
  EXPECT_EQ(o.lhs, Rational(11, 16));
  EXPECT_EQ(o.rhs, Rational(11, 16));
  sublin::PengOptions opts;
  opts.mode = sublin::PengMode::exact;
  EXPECT_TRUE(sublin::check_peng_independence(v, 2, opts).verdict);
}

TEST(Independence, ProductOfSingleMeasureIsPengIndependent) {
  JointModel<Rational> m({"X", "Y"}, {{0, 1}, {0, 1}},
                         {{Rational(1, 6), Rational(1, 3), Rational(1, 6), Rational(1, 3)}});
  sublin::PengOptions opts;
  opts.mode = sublin::PengMode::exact;
  EXPECT_TRUE(sublin::check_peng_independence(m, 2, opts).verdict);
  EXPECT_TRUE(sublin::check_pseudo_independence(m, 2).verdict);
}

TEST(Independence, CorrelatedIsNotPseudoIndependent) {
  JointModel<Rational> m({"X", "Y"}, {{0, 1}, {0, 1}}, {{Rational(1, 2), 0, 0, Rational(1, 2)}});
  const auto r = sublin::check_pseudo_independence(m, 2);
  EXPECT_FALSE(r.verdict);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.gap, Rational(1, 2));
}

TEST(Independence, ExactModeRespectsCaps) {
  sublin::PengOptions opts;
  opts.mode = sublin::PengMode::exact;
  opts.cell_cap = 2;
  try {
    (void)sublin::check_peng_independence(example(), 2, opts);
    FAIL();
  } catch (const sublin::Error& e) {
    EXPECT_EQ(e.kind(), sublin::ErrorKind::model_too_large);
  }
}

TEST(Independence, FloatModeAgrees) {
  const auto m = sublin::parse_joint_model<double>(sublin::read_text_file(SUBLIN_CONFIG_DIR "/example36.json"));
  EXPECT_TRUE(sublin::check_pseudo_independence(m, 2).verdict);
  sublin::Probe<double> p{"diagonal", [](std::span<const double> x) { return x[0] == x[1] ? 1.0 : 0.0; }};
  const auto o = sublin::evaluate_probe(m, 2, p);
  EXPECT_DOUBLE_EQ(o.lhs, 0.625);
  EXPECT_DOUBLE_EQ(o.rhs, 0.6875);
}
