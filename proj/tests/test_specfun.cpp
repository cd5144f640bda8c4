#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "hilfer/specfun.hpp"

using hilfer::beta;
using hilfer::incomplete_beta;
using hilfer::log_gamma;

namespace {

// Reference values: tests/oracle/gamma_oracle.py (mpmath, 40 digits).
constexpr double kGammaThird = 2.678938534707747633655693;
constexpr double kGammaHalf = 1.772453850905516027298167;

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

}  // namespace

TEST(Gamma, OracleValues) {
  EXPECT_LT(rel(hilfer::gamma(1.0 / 3.0), kGammaThird), 1e-14);
  EXPECT_LT(rel(hilfer::gamma(0.5), kGammaHalf), 1e-14);
  EXPECT_EQ(hilfer::gamma(5.0), 24.0);
  EXPECT_LT(rel(hilfer::gamma(-0.5), -3.544907701811032054596335), 1e-14);
  EXPECT_LT(rel(hilfer::gamma(-2.5), -0.9453087204829418812256893), 1e-14);
  EXPECT_LT(rel(hilfer::gamma(1e-3), 999.4237724845954661149822), 1e-14);
  EXPECT_LT(rel(hilfer::gamma(0.1), 9.513507698668731836292487), 1e-14);
  EXPECT_LT(rel(hilfer::gamma(7.3), 1271.423633663909273057994), 1e-14);
  EXPECT_LT(rel(hilfer::gamma(170.5), 5.56209241455999961070581e+305), 1e-13);
}

TEST(Gamma, SmallIntegersAreFactorials) {
  double fact = 1.0;
  for (int n = 1; n <= 20; ++n) {
    EXPECT_LT(rel(hilfer::gamma(n), fact), 4e-16) << "n = " << n;
    fact *= n;
  }
}

TEST(Gamma, PolesThrow) {
  EXPECT_THROW(hilfer::gamma(0.0), hilfer::PoleError);
  EXPECT_THROW(hilfer::gamma(-1.0), hilfer::PoleError);
  EXPECT_THROW(hilfer::gamma(-3.0 + 1e-13), hilfer::PoleError);
  EXPECT_NO_THROW(hilfer::gamma(-3.0 + 1e-9));
  EXPECT_THROW(hilfer::gamma(std::numeric_limits<double>::quiet_NaN()), hilfer::DomainError);
}

TEST(Gamma, OverflowThrows) {
  EXPECT_THROW(hilfer::gamma(172.0), hilfer::OverflowError);
  EXPECT_NO_THROW(hilfer::gamma(171.5));
}

TEST(GammaProperty, RecurrenceHolds) {
  for (double x = -4.95; x < 160.0; x += 0.731) {
    if (std::abs(x - std::nearbyint(x)) < 1e-6 && x <= 0) continue;
    const double lhs = hilfer::gamma(x + 1.0);
    const double rhs = x * hilfer::gamma(x);
    EXPECT_LT(rel(lhs, rhs), 1e-10) << "x = " << x;
  }
}

TEST(GammaProperty, ReflectionHolds) {
  for (double x = 0.013; x < 1.0; x += 0.0371) {
    const double lhs = hilfer::gamma(x) * hilfer::gamma(1.0 - x);
    const double rhs = M_PI / std::sin(M_PI * x);
    EXPECT_LT(rel(lhs, rhs), 1e-10) << "x = " << x;
  }
  for (double x = -7.77; x < 0.0; x += 0.613) {
    const double lhs = hilfer::gamma(x) * hilfer::gamma(1.0 - x);
    const double rhs = M_PI / std::sin(M_PI * x);
    EXPECT_LT(rel(lhs, rhs), 1e-10) << "x = " << x;
  }
}

TEST(GammaProperty, AgreesWithLogGamma) {
  for (double x = 0.05; x < 150.0; x *= 1.37) {
    EXPECT_NEAR(log_gamma(x), std::log(hilfer::gamma(x)), 1e-12 * std::max(1.0, std::abs(log_gamma(x))));
  }
  EXPECT_NEAR(log_gamma(1000.0), std::lgamma(1000.0), 1e-12 * std::lgamma(1000.0));
}

TEST(Beta, OracleValues) {
  EXPECT_LT(rel(beta(0.5, 1.0 / 3.0), 4.206546315976362783525057), 1e-14);
  EXPECT_LT(rel(beta(2.5, 3.5), 0.0368155389092553895132341), 1e-14);
  EXPECT_LT(rel(beta(100, 120), 5.01151915410920014182598e-67), 1e-12);
}

TEST(Beta, SymmetricBitwise) {
  for (double x : {0.1, 0.5, 1.7, 33.0}) {
    for (double y : {0.2, 2.0, 7.5}) EXPECT_EQ(beta(x, y), beta(y, x));
  }
}

TEST(Beta, NonPositiveArgumentsThrow) {
  EXPECT_THROW(beta(0.0, 1.0), hilfer::DomainError);
  EXPECT_THROW(beta(1.0, -0.5), hilfer::DomainError);
}

TEST(IncompleteBeta, OracleValues) {
  EXPECT_LT(rel(incomplete_beta(0.3, 0.5, 2.5), 0.9388131317179206256671541), 1e-13);
  EXPECT_LT(rel(incomplete_beta(0.8, 1.0 / 3.0, 0.75), 3.00138576493988895197271), 1e-13);
}

TEST(IncompleteBeta, EndpointsAndComplement) {
  EXPECT_EQ(incomplete_beta(0.0, 0.4, 0.6), 0.0);
  EXPECT_EQ(incomplete_beta(1.0, 0.4, 0.6), beta(0.4, 0.6));
  for (double x : {0.1, 0.35, 0.5, 0.77}) {
    const double sum = incomplete_beta(x, 0.4, 1.6) + incomplete_beta(1.0 - x, 1.6, 0.4);
    EXPECT_LT(rel(sum, beta(0.4, 1.6)), 1e-13);
  }
  EXPECT_THROW(incomplete_beta(1.5, 1.0, 1.0), hilfer::DomainError);
}
