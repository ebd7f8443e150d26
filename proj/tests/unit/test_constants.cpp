#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "treegibbs/constants.hpp"
#include "treegibbs/error.hpp"

using namespace treegibbs;

TEST(Lambda, ValuesAndMonotonicity) {
  EXPECT_EQ(lambda_d(2), 0.5);
  EXPECT_NEAR(lambda_d(3), 1 / std::sqrt(3.0), 1e-15);
  for (int d = 2; d < 50; ++d) {
    EXPECT_LT(lambda_d(d), lambda_d(d + 1));
    EXPECT_LT(lambda_d(d + 1), 1.0);
  }
  EXPECT_THROW(lambda_d(1), InvalidArgument);
}

TEST(Mu, MaximumOfPhi) {
  EXPECT_NEAR(mu_d(2), 0.25, 1e-15);
  for (int d : {2, 3, 5}) {
    EXPECT_NEAR(mu_d(d), phi_d(d, lambda_d(d)), 1e-15);
    for (double r = 0.1; r < 0.95; r += 0.1)
      if (std::abs(r - lambda_d(d)) > 1e-9) EXPECT_LT(phi_d(d, r), mu_d(d));
  }
}

TEST(Rho, ReferenceValueAndPolynomialResidual) {
  EXPECT_NEAR(rho_dn(2, 2), 0.473, 1e-3);
  EXPECT_NEAR(rho_dn(2, 1), 0.4534, 1e-4);
  for (int d = 2; d <= 8; ++d)
    for (int n = 1; n <= 20; ++n) {
      const double r = rho_dn(d, n);
      const double res = (d - 1) * std::pow(r, d + 1) + d * n * std::pow(r, d - 1) - n;
      EXPECT_LT(std::abs(res), 1e-12);
      EXPECT_LT(r, lambda_d(d));
      EXPECT_GT(r, 0.0);
    }
}

TEST(Rho, IsTheMaximiserOfF) {
  for (int d : {2, 3, 6})
    for (int n : {1, 2, 10}) EXPECT_NEAR(rho_dn(d, n), oracle::rho(d, n), 1e-7);
}

TEST(Eta, ReferenceValueAndSandwich) {
  EXPECT_NEAR(eta_dn(2, 2), 0.152, 1e-3);
  EXPECT_NEAR(eta_dn(2, 1), 0.2335, 1e-4);
  EXPECT_NEAR(eta_dn(2, 2), oracle::eta(2, 2), 1e-13);
  for (int d = 2; d <= 10; ++d)
    for (int n = 1; n <= 50; ++n) {
      const double e = eta_dn(d, n);
      const double base = lambda_d(d) * (1 - 1.0 / d);
      EXPECT_LE(base * std::pow(n + 1.0, -d / (d + 1.0)), e);
      EXPECT_LE(e, base * std::pow(double(n), -d / (d + 1.0)));
      EXPECT_GT(e, 0.0);
      EXPECT_LT(e, 1.0);
    }
}

TEST(FG, Endpoints) {
  for (int d : {2, 3, 7}) {
    EXPECT_EQ(f_dn(d, 3, 0.0), 0.0);
    EXPECT_NEAR(g_d(d, lambda_d(d)), 0.0, 1e-15);
  }
  EXPECT_THROW(g_d(2, 0.0), InvalidArgument);
  EXPECT_THROW(g_d(2, 0.6), InvalidArgument);
}

TEST(FG, GridMaximumNearReferenceValues) {
  double best = -1, arg = 0;
  for (int k = 0; k <= 10000; ++k) {
    const double r = k / 10000.0;
    if (f_dn(2, 2, r) > best) best = f_dn(2, 2, r), arg = r;
  }
  EXPECT_NEAR(arg, 0.473, 1e-3);
  EXPECT_NEAR(best, 0.152, 1e-3);
}

TEST(RStar, ReferenceValueAndOrdering) {
  EXPECT_NEAR(r_star(2, 2), 0.481, 1e-3);
  EXPECT_NEAR(r_star(2, 2), oracle::r_star(2, 2), 1e-11);
  EXPECT_NEAR(r_star(2, 2), 0.481229116614, 1e-11);
  for (int d = 2; d <= 6; ++d)
    for (int n = 1; n <= 20; ++n) {
      const double rs = r_star(d, n);
      EXPECT_GT(rs, rho_dn(d, n));
      EXPECT_LT(rs, lambda_d(d));
    }
}

TEST(RStar, FBelowGLeftAndAboveRight) {
  for (int d : {2, 3, 5})
    for (int n : {1, 4}) {
      const double rs = r_star(d, n), lam = lambda_d(d);
      for (int k = 1; k < 200; ++k) {
        const double left = rs * k / 200.0;
        EXPECT_LT(f_dn(d, n, left), g_d(d, left));
        const double right = rs + (lam - rs) * k / 200.0;
        EXPECT_GT(f_dn(d, n, right), g_d(d, right));
      }
    }
}

TEST(Psi, EndpointsInverseAndConcavityBound) {
  for (int d : {2, 3, 4}) {
    EXPECT_EQ(psi_d(d, 0.0), 1.0);
    EXPECT_EQ(psi_d(d, mu_d(d)), lambda_d(d));
    const double slope = (std::pow(d, d / (d - 1.0)) - d) / (d - 1.0);
    double prev = 1.0;
    for (int k = 1; k <= 100; ++k) {
      const double s = mu_d(d) * k / 100.0;
      const double r = psi_d(d, s);
      EXPECT_LT(std::abs(phi_d(d, r) - s), 1e-13);
      EXPECT_LT(r, prev);
      EXPECT_GE(r, 1 - slope * s - 1e-13);
      prev = r;
    }
  }
  EXPECT_NEAR(psi_d(2, phi_d(2, 0.9)), 0.9, 1e-12);
  EXPECT_THROW(psi_d(2, 0.3), InvalidArgument);
  EXPECT_THROW(psi_d(2, -0.1), InvalidArgument);
}

TEST(SolveRq, EndpointsAndConvexityBound) {
  EXPECT_EQ(solve_rq(2, 1, 0.0), 0.0);
  EXPECT_EQ(solve_rq(3, 2, eta_dn(3, 2)), rho_dn(3, 2));
  const double r = solve_rq(2, 1, 0.1);
  EXPECT_LT(std::abs(f_dn(2, 1, r) - 0.1), 1e-12);
  EXPECT_LE(r, rho_dn(2, 1) / eta_dn(2, 1) * 0.1);
  EXPECT_THROW(solve_rq(2, 1, eta_dn(2, 1) * 1.001), ThresholdExceeded);
}

TEST(TheoremConstants, PositiveAndOrdered) {
  for (int d = 2; d <= 8; ++d)
    for (int n = 1; n <= 10; ++n) {
      const auto k = theorem_constants(d, n);
      for (double c : {k.c1, k.c2, k.c3, k.c4, k.c5, k.c6, k.c7}) EXPECT_GT(c, 0.0);
      EXPECT_GT(k.theta, 0.0);
      EXPECT_LT(k.theta, 1.0);
      EXPECT_GT(k.c4, k.c2);
    }
  EXPECT_NEAR(theorem_constants(2, 2).theta, std::pow(rho_dn(2, 2) / 0.5, 3), 1e-15);
  EXPECT_NEAR(theorem_constants(2, 2).theta, 0.849, 1e-3);
}

TEST(Suites, ShapeSuitePassesOnGrid) {
  for (int d = 2; d <= 10; ++d)
    for (int n : {1, 2, 5, 10, 50})
      for (const auto& c : shape_suite(d, n)) EXPECT_TRUE(c.pass) << c.name << " " << c.worst;
}

TEST(Suites, EtaBoundsSuitePasses) {
  for (const auto& c : eta_bounds_suite(2, 10, 1, 50)) EXPECT_TRUE(c.pass) << c.name << c.detail;
}
