#include <gtest/gtest.h>

#include <cmath>

#include "gpsav/gauss_tableau.hpp"

using namespace gpsav;

TEST(GaussTableau, OneStageIsMidpoint) {
  const auto t = gauss_tableau(1);
  ASSERT_EQ(t.s, 1);
  EXPECT_DOUBLE_EQ(t.c[0], 0.5);
  EXPECT_DOUBLE_EQ(t.b[0], 1.0);
  EXPECT_DOUBLE_EQ(t(0, 0), 0.5);
}

TEST(GaussTableau, TwoStageClosedForm) {
  const auto t = gauss_tableau(2);
  const double r3 = std::sqrt(3.0);
  EXPECT_NEAR(t.c[0], 0.5 - r3 / 6, 1e-15);
  EXPECT_NEAR(t.c[1], 0.5 + r3 / 6, 1e-15);
  EXPECT_NEAR(t(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(t(0, 1), 0.25 - r3 / 6, 1e-15);
  EXPECT_NEAR(t(1, 0), 0.25 + r3 / 6, 1e-15);
  EXPECT_NEAR(t(1, 1), 0.25, 1e-15);
  EXPECT_NEAR(t.b[0], 0.5, 1e-15);
  EXPECT_NEAR(t.b[1], 0.5, 1e-15);
}

TEST(GaussTableau, ThreeStageClosedForm) {
  const auto t = gauss_tableau(3);
  const double r = std::sqrt(15.0);
  const double a[3][3] = {{5.0 / 36, 2.0 / 9 - r / 15, 5.0 / 36 - r / 30},
                          {5.0 / 36 + r / 24, 2.0 / 9, 5.0 / 36 - r / 24},
                          {5.0 / 36 + r / 30, 2.0 / 9 + r / 15, 5.0 / 36}};
  const double c[3] = {0.5 - r / 10, 0.5, 0.5 + r / 10};
  const double b[3] = {5.0 / 18, 4.0 / 9, 5.0 / 18};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(t.c[i], c[i], 1e-15);
    EXPECT_NEAR(t.b[i], b[i], 1e-15);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(t(i, j), a[i][j], 1e-15) << i << "," << j;
  }
}

TEST(GaussTableau, RejectsOutOfRange) {
  EXPECT_THROW(gauss_tableau(0), InvalidArgument);
  EXPECT_THROW(gauss_tableau(6), InvalidArgument);
}

TEST(VerifyOrderConditions, TwoAndThreeStage) {
  EXPECT_LE(verify_order_conditions(gauss_tableau(2)).max_residual, 1e-14);
  EXPECT_LE(verify_order_conditions(gauss_tableau(3)).max_residual, 1e-13);
}

TEST(VerifyOrderConditions, TamperedWeightsFail) {
  auto t = gauss_tableau(2);
  t.b = {0.6, 0.4};
  const auto r = verify_order_conditions(t);
  EXPECT_GT(r.max_residual, 1e-2);
  EXPECT_FALSE(r.passed());
}

TEST(GaussTableauProperties, AllStageCounts) {
  for (int s = 1; s <= kMaxStages; ++s) {
    const auto t = gauss_tableau(s);
    const auto r = verify_order_conditions(t);
    EXPECT_LE(r.symplectic_residual, 1e-13) << "s=" << s;
    EXPECT_LE(r.quadrature_residual, 1e-13) << "s=" << s;
    EXPECT_LE(r.stage_residual, 1e-13) << "s=" << s;
    double bsum = 0.0;
    for (double b : t.b) bsum += b;
    EXPECT_NEAR(bsum, 1.0, 1e-14);
    for (int i = 0; i < s; ++i) {
      double row = 0.0;
      for (int j = 0; j < s; ++j) row += t(i, j);
      EXPECT_NEAR(row, t.c[i], 1e-14);
      EXPECT_GT(t.c[i], 0.0);
      EXPECT_LT(t.c[i], 1.0);
      if (i > 0) {
        EXPECT_LT(t.c[i - 1], t.c[i]);
      }
    }
  }
}
