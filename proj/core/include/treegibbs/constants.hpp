#pragma once

// Scalar constants of the strong-coupling construction on the d-regular tree.
// d is the tree order (each vertex has d+1 neighbours), n = |A| the size of
// the localization set.

#include <string>
#include <vector>

namespace treegibbs {

/// d^(-1/(d-1)): the maximiser of phi_d on [0, inf).
double lambda_d(int d);
/// lambda_d (1 - 1/d) = max phi_d.
double mu_d(int d);

double phi_d(int d, double r);
/// (r - r^d) / (r^(d+1) + n)^(d/(d+1)). Self-map condition for the inner ball.
double f_dn(int d, int n, double r);
/// ((lambda_d / r)^((d^2-1)/2) - 1)^(2/(d+1)) on (0, lambda_d]. Contraction
/// condition for the inner map.
double g_d(int d, double r);

/// Unique positive root of (d-1) r^(d+1) + d n r^(d-1) - n.
double rho_dn(int d, int n);
/// f_dn(rho_dn): the largest admissible deviation norm for |A| = n.
double eta_dn(int d, int n);

/// Inverse of phi_d restricted to [lambda_d, 1]; s in [0, mu_d].
double psi_d(int d, double s);

/// Inner-ball radius r in [0, rho] with f_dn(r) = eps.
/// Throws ThresholdExceeded when eps > eta_dn(d, n).
double solve_rq(int d, int n, double eps);

/// Crossing point of f_dn and g_d in (0, lambda_d).
double r_star(int d, int n);

struct ModelConstants {
  int d = 0;
  int n = 0;
  double lambda = 0, mu = 0, rho = 0, eta = 0, theta = 0;
  // Gibbs-measure bounds.
  double c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0, c6 = 0, c7 = 0;
  // Boundary-law bounds: ||x|_{A^c}||_{d+1} <= k_outside * eps,
  // 1 - x|_A <= k_inside * eps, x(i) >= (1 - k_lower eps) sum_A Q(i - j).
  double k_outside = 0, k_inside = 0, k_lower = 0;
};

ModelConstants theorem_constants(int d, int n);

// Sampled numerical checks of the analytic lemmas behind the constants.

struct CheckResult {
  std::string name;
  bool pass = false;
  /// Worst observed slack (negative when violated) or max violation.
  double worst = 0.0;
  std::string detail;
};

/// Grid checks of the shape of f_dn and g_d: f increasing on [0, rho],
/// decreasing on [rho, 1], concave on [0, 1]; g decreasing on (0, lambda];
/// f < g left of r_*, f > g right of it; rho < r_* < lambda.
std::vector<CheckResult> shape_suite(int d, int n, int grid_points = 10000,
                                     double tol = 1e-9);

/// Sandwich lambda (1-1/d) (n+1)^(-d/(d+1)) <= eta <= lambda (1-1/d) n^(-d/(d+1))
/// and e d n^d <= eta^(-(d+1)) <= 32 e d n^d over the given ranges.
std::vector<CheckResult> eta_bounds_suite(int d_min, int d_max, int n_min,
                                          int n_max);

}  // namespace treegibbs
