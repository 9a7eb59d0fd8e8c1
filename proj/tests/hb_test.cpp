#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <chatter/hb.hpp>

using namespace chatter;

namespace {

// |a - b| <= tol * |b|
::testing::AssertionResult RelNear(double a, double b, double tol) {
  if (std::abs(a - b) <= tol * std::abs(b)) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << a << " vs " << b << " (rel " << std::abs(a - b) / std::abs(b)
                                       << " > " << tol << ")";
}

// Rounds to n significant digits.
double sig(double v, int n) {
  const double e = std::floor(std::log10(std::abs(v)));
  const double scale = std::pow(10.0, n - 1 - e);
  return std::round(v * scale) / scale;
}

const double kSqrt10 = std::sqrt(10.0);

} // namespace

TEST(FosmcPredict, LargeRelayGain) {
  const auto p = fosmc_predict({66.0}, 0.2);
  EXPECT_NEAR(p.A, 8.40338, 1e-5);
  EXPECT_DOUBLE_EQ(p.omega, 5.0);
  EXPECT_NEAR(p.P, 882.7102, 1e-4);
  EXPECT_TRUE(p.consistent());
}

TEST(FosmcPredict, UnitAmplitude) {
  const auto p = fosmc_predict({std::numbers::pi / 2}, 1.0);
  EXPECT_NEAR(p.A, 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(p.omega, 1.0);
  EXPECT_NEAR(p.P, 0.5, 1e-15);
}

TEST(FosmcPredict, DirectEvaluation) {
  const auto p = fosmc_predict({1.1}, 0.1);
  EXPECT_NEAR(p.A, 0.0700282, 1e-7);
  EXPECT_NEAR(p.omega, 10.0, 1e-12);
  EXPECT_NEAR(p.P, 2 * 1.1 * 1.1 / (std::numbers::pi * std::numbers::pi), 1e-15);
}

TEST(StaConstants, MinimumAmplitudeRecipe) {
  for (double D : {1.0, 10.0, 60.0}) {
    const auto c = sta_constants({2.127 * std::sqrt(D), 1.1 * D});
    EXPECT_NEAR(c.K_omega, 1 / std::sqrt(2.0), 1e-4);
    EXPECT_TRUE(RelNear(c.K_A, 5.6023 * D, 1e-4));
  }
}

TEST(StaConstants, MinimumPowerRecipe) {
  for (double D : {1.0, 10.0, 60.0}) {
    const auto c = sta_constants({1.504 * std::sqrt(D), 1.1 * D});
    EXPECT_NEAR(c.K_omega, 1 / std::sqrt(3.0), 1e-4);
    EXPECT_TRUE(RelNear(c.K_A, 6.3025 * D, 1e-4));
  }
}

TEST(StaConstants, LargeDisturbanceGains) {
  EXPECT_NEAR(sta_constants({16.475, 66.0}).K_A, 336.135, 2e-3);
  EXPECT_THROW(sta_constants({0.0, 1.0}), std::domain_error);
}

TEST(StaPredict, MinimumAmplitudeGainFamily) {
  const double mu = 0.01;
  struct Row { double m, A, w, P; };
  for (const Row r : {Row{1.5, 6.314e-3, 57.632, 6.620e-2}, Row{2.127, 5.602e-3, 70.711, 7.846e-2},
                      Row{2.5, 5.750e-3, 76.164, 9.589e-2}}) {
    const auto p = sta_predict({r.m * kSqrt10, 11.0}, mu);
    EXPECT_DOUBLE_EQ(sig(p.A, 4), r.A);
    EXPECT_DOUBLE_EQ(sig(p.omega, 5), r.w);
    EXPECT_DOUBLE_EQ(sig(p.P, 4), r.P);
    EXPECT_TRUE(p.consistent());
  }
}

TEST(StaPredict, UnitMultiplierGain) {
  const auto p = sta_predict({kSqrt10, 11.0}, 0.01);
  EXPECT_DOUBLE_EQ(sig(p.A, 4), 9.447e-3);
  EXPECT_DOUBLE_EQ(sig(p.omega, 5), 42.547);
  EXPECT_DOUBLE_EQ(sig(p.P, 4), 8.078e-2);
}

TEST(AveragedPower, Values) {
  EXPECT_DOUBLE_EQ(averaged_power(1.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(averaged_power(0.2, 3.0), 0.18);
  EXPECT_NEAR(averaged_power(8.40338, 5.0), 882.710, 1e-3);
}

TEST(HbSolveNumeric, RelayMatchesClosedForm) {
  const auto n = hb_solve_numeric(FosmcGain{66.0}, 0.2);
  const auto p = fosmc_predict({66.0}, 0.2);
  EXPECT_TRUE(RelNear(n.prediction.A, p.A, 1e-10));
  EXPECT_TRUE(RelNear(n.prediction.omega, p.omega, 1e-10));
  EXPECT_TRUE(RelNear(n.prediction.P, p.P, 1e-10));
  EXPECT_LT(n.residual, 1e-9);
  EXPECT_FALSE(n.multiple_roots);
}

TEST(HbSolveNumeric, StaMatchesClosedForm) {
  const StaGains g{2.127 * kSqrt10, 11.0};
  const auto n = hb_solve_numeric(g, 0.01);
  const auto p = sta_predict(g, 0.01);
  EXPECT_TRUE(RelNear(n.prediction.A, p.A, 1e-9));
  EXPECT_TRUE(RelNear(n.prediction.omega, p.omega, 1e-9));
  EXPECT_LT(n.residual, 1e-9);
}

TEST(HbSolveNumeric, LargeMultiplierGain) {
  const auto n = hb_solve_numeric(StaGains{2.5 * kSqrt10, 11.0}, 0.01);
  EXPECT_DOUBLE_EQ(sig(n.prediction.A, 4), 5.750e-3);
  EXPECT_DOUBLE_EQ(sig(n.prediction.omega, 5), 76.164);
}

TEST(HbSolveNumeric, RejectsInvalidGains) {
  EXPECT_THROW(hb_solve_numeric(StaGains{0.0, 1.0}, 0.01), std::domain_error);
  EXPECT_THROW(hb_solve_numeric(FosmcGain{1.0}, 0.0), std::domain_error);
}

TEST(HbSolveNumeric, GridAgreement) {
  for (double mu : {1e-3, 1e-2, 1e-1})
    for (int i = 0; i < 10; ++i) {
      const double k2 = 0.1 * std::pow(10.0, 4.0 * i / 9.0);
      for (int j = 0; j < 10; ++j) {
        const StaGains g{(1.45 + (3.0 - 1.45) * j / 9.0) * std::sqrt(k2), k2};
        const auto n = hb_solve_numeric(g, mu);
        const auto p = sta_predict(g, mu);
        ASSERT_TRUE(RelNear(n.prediction.A, p.A, 1e-9));
        ASSERT_TRUE(RelNear(n.prediction.omega, p.omega, 1e-9));
        ASSERT_TRUE(RelNear(n.prediction.P, p.P, 1e-9));
        ASSERT_LT(n.residual, 1e-9);
        // Closed-form point also balances.
        ASSERT_LT(hbe_residual(sta_df(g, p.A, p.omega), freq_response(mu, p.omega)), 1e-9);
      }
    }
}

TEST(Properties, StaFrequencyBelowRelay) {
  for (double k2 : {0.01, 1.0, 11.0, 66.0, 1e4})
    for (double m : {0.5, 1.0, 2.0, 5.0, 50.0}) {
      const StaGains g{m * std::sqrt(k2), k2};
      const auto c = sta_constants(g);
      EXPECT_LT(c.K_omega, 1.0);
      EXPECT_GT(c.K_omega, 0.0);
      for (double mu : {1e-3, 0.1, 1.0})
        EXPECT_LT(sta_predict(g, mu).omega, fosmc_predict({1.0}, mu).omega);
    }
}

TEST(Properties, ScalingLaws) {
  const FosmcGain f{1.1};
  const StaGains g{2.127, 1.1};
  for (double mu : {1e-3, 1e-2}) {
    const double r = 10.0;
    EXPECT_TRUE(RelNear(fosmc_predict(f, r * mu).A / fosmc_predict(f, mu).A, r, 1e-10));
    EXPECT_TRUE(RelNear(fosmc_predict(f, r * mu).P / fosmc_predict(f, mu).P, 1.0, 1e-10));
    EXPECT_TRUE(RelNear(sta_predict(g, r * mu).A / sta_predict(g, mu).A, r * r, 1e-10));
    EXPECT_TRUE(RelNear(sta_predict(g, r * mu).P / sta_predict(g, mu).P, r * r, 1e-10));
  }
}
