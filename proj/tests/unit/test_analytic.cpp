#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ercomp/analytic.hpp"
#include "ercomp/errors.hpp"

using namespace ercomp;

namespace {

const double kSupercritical[] = {1.1, 1.5, 2.0, 3.0, 5.0};

// Root of exp(2x)(1-x) = 1 in (0,1) by plain bisection.
double bisect_theta2() {
  double lo = 0.5;
  double hi = 1.0 - 1e-12;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::exp(2 * mid) * (1 - mid) > 1 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Phi, ValuesAndDomain) {
  EXPECT_EQ(phi(2.0, 0.0), 0.0);
  EXPECT_NEAR(phi(2.0, 0.5), std::log(2.0) - 1.0, 1e-15);
  EXPECT_NEAR(phi(2.0, theta(2.0)), 0.0, 1e-12);
  EXPECT_THROW(phi(2.0, 1.0), DomainError);
  EXPECT_THROW(phi(2.0, -0.1), DomainError);
}

TEST(Theta, TwoAgainstBisection) {
  EXPECT_NEAR(theta(2.0), bisect_theta2(), 1e-12);
  EXPECT_NEAR(theta(2.0), 0.796812, 1e-6);
}

TEST(Theta, DefiningRelationAndLambertRoute) {
  for (double t : kSupercritical) {
    const double th = theta(t);
    EXPECT_GT(th, 0.0);
    EXPECT_LT(th, 1.0);
    EXPECT_NEAR(std::exp(t * th) * (1 - th), 1.0, 1e-12) << t;
    EXPECT_NEAR(th, theta_via_lambert(t), 1e-12) << t;
  }
}

TEST(Theta, DegeneratesAtCriticality) {
  EXPECT_LT(theta(1.0 + 1e-9), 1e-4);
  EXPECT_THROW(theta(1.0), DomainError);
  EXPECT_THROW(theta(0.5), DomainError);
}

TEST(Sigma, ValueAndMonotonicity) {
  EXPECT_NEAR(sigma(2.0), 0.6778, 1e-4);
  EXPECT_GT(sigma(1.01), sigma(1.1));
  EXPECT_GT(sigma(1.1), sigma(2.0));
  for (double t : {1.1, 2.0, 5.0}) EXPECT_GT(phi_prime_theta(t), 0.0);
}

TEST(Sigma, ConstantsAreConsistent) {
  for (double t : kSupercritical) {
    const auto c = supercritical_constants(t);
    EXPECT_EQ(c.t, t);
    EXPECT_NEAR(c.phi_prime_theta, -t + 1.0 / (1.0 - c.theta), 1e-12);
    EXPECT_NEAR(c.sigma, std::sqrt(c.theta) / (c.phi_prime_theta * std::sqrt(1 - c.theta)), 1e-12);
    EXPECT_NEAR(c.sigma, sigma(t), 1e-12);
  }
}

TEST(LambertW, EndpointsAndResidual) {
  EXPECT_EQ(lambert_w0(0.0), 0.0);
  EXPECT_NEAR(lambert_w0(-1.0 / std::numbers::e), -1.0, 1e-7);
  for (int i = 1; i < 200; ++i) {
    const double x = -static_cast<double>(i) / 200.0 / std::numbers::e;
    const double w = lambert_w0(x);
    EXPECT_GE(w, -1.0);
    EXPECT_LE(w, 0.0);
    EXPECT_LE(std::fabs(w * std::exp(w) - x), 1e-14) << x;
  }
  EXPECT_THROW(lambert_w0(0.1), DomainError);
  EXPECT_THROW(lambert_w0(-0.4), DomainError);
}

TEST(Borel, PmfAnchorsAndMoments) {
  for (double t : {0.2, 0.5, 0.9}) EXPECT_NEAR(borel_pmf(t, 1), std::exp(-t), 1e-15);
  double mass = 0.0;
  double mean = 0.0;
  for (long k = 1; k <= 200; ++k) {
    const double p = borel_pmf(0.5, k);
    mass += p;
    mean += static_cast<double>(k) * p;
  }
  EXPECT_NEAR(mass, 1.0, 1e-12);
  EXPECT_NEAR(mean, 2.0, 1e-10);
  EXPECT_THROW(borel_pmf(1.0, 1), DomainError);
  EXPECT_THROW(borel_pmf(0.5, 0), DomainError);
}

TEST(Borel, GeneratingFunctionAgainstSeries) {
  EXPECT_EQ(borel_gf(0.5, 0.0), 0.0);
  for (double t : {0.1, 0.5, 0.9}) EXPECT_NEAR(borel_gf(t, 1.0), 1.0, 1e-12);
  for (double z : {0.25, 0.5, 0.9}) {
    double series = 0.0;
    double zk = 1.0;
    for (long k = 1; k <= 500; ++k) {
      zk *= z;
      series += zk * borel_pmf(0.5, k);
    }
    EXPECT_NEAR(borel_gf(0.5, z), series, 1e-10) << z;
  }
}

TEST(Borel, GeneratingFunctionFixedPoint) {
  for (double t : {0.05, 0.3, 0.5, 0.7, 0.95}) {
    for (double z : {0.0, 0.1, 0.4, 0.75, 0.99, 1.0}) {
      const double g = borel_gf(t, z);
      EXPECT_NEAR(g, z * std::exp((g - 1) * t), 1e-12) << t << ' ' << z;
    }
  }
}

TEST(Susceptibility, ExpansionValues) {
  EXPECT_EQ(susceptibility_expansion(0.0, 17, 1), 1.0);
  EXPECT_NEAR(susceptibility_expansion(0.5, 400, 1), 1.985, 1e-15);
  EXPECT_EQ(susceptibility_expansion(0.5, 400, 0), 2.0);
  EXPECT_THROW(susceptibility_expansion(1.0, 10, 0), DomainError);
  EXPECT_THROW(susceptibility_expansion(0.5, 10, 2), DomainError);
}

TEST(SecondMoment, LeadingTerm) {
  EXPECT_EQ(second_moment_leading(0.0), 1.0);
  EXPECT_NEAR(second_moment_leading(0.5), 8.0, 1e-15);
  EXPECT_NEAR(second_moment_leading(0.9), 1000.0, 1e-9);
  EXPECT_THROW(second_moment_leading(1.0), DomainError);
}
