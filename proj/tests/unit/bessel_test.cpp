#include <gtest/gtest.h>

#include <stdexcept>

#include "modrabi/bessel.hpp"
#include "oracles.hpp"

using modrabi::bessel_j;
using modrabi::bessel_j_signed;

TEST(Bessel, Origin) {
  EXPECT_EQ(bessel_j(0, 0.0), 1.0);
  EXPECT_EQ(bessel_j(1, 0.0), 0.0);
  EXPECT_EQ(bessel_j(5, 0.0), 0.0);
}

TEST(Bessel, FirstZeroAndBalancedPoint) {
  EXPECT_NEAR(bessel_j(0, 2.404826), 0.0, 1e-6);
  EXPECT_NEAR(bessel_j(0, modrabi::kBesselJ0FirstZero), 0.0, 1e-15);
  EXPECT_NEAR(bessel_j(0, 1.4346), 0.548, 1e-3);
  EXPECT_NEAR(bessel_j(1, 1.4346), 0.548, 1e-3);
}

TEST(Bessel, AgreesWithSeriesOracleAcrossDomain) {
  double worst = 0.0;
  for (int n = 0; n <= 12; ++n) {
    for (double x = -50.0; x <= 50.0; x += 0.37) {
      worst = std::max(worst, std::abs(bessel_j(n, x) - oracle::bessel_j(n, x)));
    }
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Bessel, Recurrence) {
  for (int n = 1; n <= 10; ++n) {
    for (double x = 0.1; x <= 10.0; x += 0.1) {
      const double lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x);
      EXPECT_NEAR(lhs, 2.0 * n / x * bessel_j(n, x), 1e-10) << n << " " << x;
    }
  }
}

TEST(Bessel, NegativeOrderReflection) {
  for (int n = 1; n <= 6; ++n) {
    EXPECT_DOUBLE_EQ(bessel_j_signed(-n, 1.3), (n % 2 ? -1.0 : 1.0) * bessel_j(n, 1.3));
  }
}

TEST(Bessel, DomainErrors) {
  EXPECT_THROW(bessel_j(-1, 1.0), std::domain_error);
  EXPECT_THROW(bessel_j(0, 50.5), std::domain_error);
  EXPECT_THROW(bessel_j(0, std::nan("")), std::domain_error);
}
