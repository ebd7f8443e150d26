#include "treegibbs/constants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bisect.hpp"
#include "treegibbs/error.hpp"

namespace treegibbs {
namespace {

constexpr double kHuge = 1e300;

void require_order(int d) {
  if (d < 2) throw InvalidArgument("tree order d must be >= 2");
}

void require_size(int n) {
  if (n < 1) throw InvalidArgument("localization set size n must be >= 1");
}

double rho_polynomial(int d, int n, double r) {
  return (d - 1) * std::pow(r, d + 1) + d * n * std::pow(r, d - 1) - n;
}

}  // namespace

double lambda_d(int d) {
  require_order(d);
  return std::pow(static_cast<double>(d), -1.0 / (d - 1));
}

double mu_d(int d) { return lambda_d(d) * (1.0 - 1.0 / d); }

double phi_d(int d, double r) {
  require_order(d);
  return r - std::pow(r, d);
}

double f_dn(int d, int n, double r) {
  require_order(d);
  require_size(n);
  if (r < 0.0) throw InvalidArgument("f_dn requires r >= 0");
  const double dd = d;
  return (r - std::pow(r, d)) / std::pow(std::pow(r, d + 1) + n, dd / (dd + 1));
}

double g_d(int d, double r) {
  const double lambda = lambda_d(d);
  if (!(r > 0.0) || r > lambda)
    throw InvalidArgument("g_d requires 0 < r <= lambda_d");
  const double dd = d;
  const double base = std::pow(lambda / r, (dd * dd - 1) / 2) - 1.0;
  return std::pow(std::max(base, 0.0), 2.0 / (dd + 1));
}

double rho_dn(int d, int n) {
  require_order(d);
  require_size(n);
  // The polynomial is strictly increasing on (0, inf) with value -n at 0.
  double hi = lambda_d(d);
  if (rho_polynomial(d, n, hi) <= 0.0) hi = 1.0;
  return detail::bisect([&](double r) { return rho_polynomial(d, n, r); }, 0.0,
                        hi);
}

double eta_dn(int d, int n) { return f_dn(d, n, rho_dn(d, n)); }

double psi_d(int d, double s) {
  const double mu = mu_d(d);
  if (!(s >= 0.0) || s > mu)
    throw InvalidArgument("psi_d requires 0 <= s <= mu_d");
  if (s == 0.0) return 1.0;
  if (s == mu) return lambda_d(d);
  // phi_d decreases on [lambda_d, 1] from mu_d to 0.
  return detail::bisect([&](double r) { return phi_d(d, r) - s; }, lambda_d(d),
                        1.0);
}

double solve_rq(int d, int n, double eps) {
  if (!(eps >= 0.0)) throw InvalidArgument("solve_rq requires eps >= 0");
  const double rho = rho_dn(d, n);
  const double eta = f_dn(d, n, rho);
  if (eps > eta) {
    std::ostringstream os;
    os << "deviation norm " << eps << " exceeds eta(" << d << "," << n
       << ") = " << eta;
    throw ThresholdExceeded(os.str(), eps, eta);
  }
  if (eps == 0.0) return 0.0;
  if (eps == eta) return rho;
  return detail::bisect([&](double r) { return f_dn(d, n, r) - eps; }, 0.0, rho);
}

double r_star(int d, int n) {
  const double lambda = lambda_d(d);
  // f - g < 0 near 0 (g blows up) and > 0 at lambda (g vanishes).
  double lo = 0.5 * rho_dn(d, n);
  while (f_dn(d, n, lo) - g_d(d, lo) >= 0.0) lo *= 0.5;
  return detail::bisect([&](double r) { return f_dn(d, n, r) - g_d(d, r); }, lo,
                        lambda);
}

ModelConstants theorem_constants(int d, int n) {
  ModelConstants c;
  c.d = d;
  c.n = n;
  c.lambda = lambda_d(d);
  c.mu = mu_d(d);
  c.rho = rho_dn(d, n);
  c.eta = f_dn(d, n, c.rho);
  const double dd = d;
  const double nn = n;
  c.theta = std::pow(std::pow(dd, 1.0 / (dd - 1)) * c.rho, dd + 1);

  const double gap = std::pow(dd, dd / (dd - 1)) - dd;  // d^(d/(d-1)) - d
  const double growth = std::pow(1.0 + nn, dd / (dd + 1));
  const double mass = std::pow(c.rho, dd + 1) / (nn * std::pow(c.eta, dd + 1));

  c.c1 = std::pow(c.rho / c.eta, dd - 1);
  c.c2 = gap * growth;
  c.c3 = std::pow(dd, (dd + 1) / (dd - 1)) * mass;
  c.c4 = c.c2 * (dd + 1) / (dd - 1);
  c.c5 = c.c4 + mass;
  c.c6 = dd * c.c4 + mass;
  c.c7 = std::pow(c.c3, dd / (dd + 1));

  c.k_outside = c.rho / c.eta;
  c.k_inside = gap / (dd - 1) * growth;
  c.k_lower = dd / (dd - 1) * gap * growth;
  return c;
}

std::vector<CheckResult> shape_suite(int d, int n, int grid_points, double tol) {
  const double rho = rho_dn(d, n);
  const double lambda = lambda_d(d);
  const double rs = r_star(d, n);
  std::vector<CheckResult> out;
  std::ostringstream tag;
  tag << "(d=" << d << ",n=" << n << ")";

  const int m = grid_points;
  auto grid = [&](double a, double b, int k) { return a + (b - a) * k / m; };

  // Monotonicity: worst signed step, positive means correct direction.
  double worst_inc = kHuge;
  for (int k = 0; k < m; ++k)
    worst_inc = std::min(worst_inc, f_dn(d, n, grid(0, rho, k + 1)) -
                                        f_dn(d, n, grid(0, rho, k)));
  out.push_back({"f increasing on [0,rho] " + tag.str(), worst_inc > -tol,
                 worst_inc, ""});

  double worst_dec = kHuge;
  for (int k = 0; k < m; ++k)
    worst_dec = std::min(worst_dec, f_dn(d, n, grid(rho, 1, k)) -
                                        f_dn(d, n, grid(rho, 1, k + 1)));
  out.push_back({"f decreasing on [rho,1] " + tag.str(), worst_dec > -tol,
                 worst_dec, ""});

  double worst_second = kHuge;
  for (int k = 1; k < m; ++k) {
    const double second = f_dn(d, n, grid(0, 1, k + 1)) -
                          2 * f_dn(d, n, grid(0, 1, k)) +
                          f_dn(d, n, grid(0, 1, k - 1));
    worst_second = std::min(worst_second, -second);
  }
  out.push_back({"f concave on [0,1] " + tag.str(), worst_second > -tol,
                 worst_second, ""});

  double worst_g = kHuge;
  const double g_lo = lambda / m;
  for (int k = 0; k < m; ++k)
    worst_g = std::min(worst_g, g_d(d, grid(g_lo, lambda, k)) -
                                    g_d(d, grid(g_lo, lambda, k + 1)));
  out.push_back({"g decreasing on (0,lambda] " + tag.str(), worst_g > -tol,
                 worst_g, ""});

  // Strict ordering on either side of r_*, excluding a small neighbourhood.
  double worst_left = kHuge;
  double worst_right = kHuge;
  for (int k = 1; k <= m; ++k) {
    const double r = grid(0, lambda, k);
    if (std::abs(r - rs) < 1e-6) continue;
    const double gap = g_d(d, r) - f_dn(d, n, r);
    if (r < rs) worst_left = std::min(worst_left, gap);
    else worst_right = std::min(worst_right, -gap);
  }
  out.push_back({"f < g on (0,r*) " + tag.str(), worst_left > 0.0, worst_left, ""});
  out.push_back({"f > g on (r*,lambda] " + tag.str(), worst_right > 0.0,
                 worst_right, ""});
  out.push_back({"rho < r* < lambda " + tag.str(), rho < rs && rs < lambda,
                 std::min(rs - rho, lambda - rs), ""});
  return out;
}

std::vector<CheckResult> eta_bounds_suite(int d_min, int d_max, int n_min,
                                          int n_max) {
  CheckResult sandwich{"eta sandwich", true, kHuge, ""};
  CheckResult power{"e d n^d <= eta^-(d+1) <= 32 e d n^d", true, kHuge, ""};
  CheckResult below{"rho < lambda_d", true, kHuge, ""};
  const double e = std::numbers::e;
  for (int d = d_min; d <= d_max; ++d) {
    const double dd = d;
    const double lambda = lambda_d(d);
    for (int n = n_min; n <= n_max; ++n) {
      const double nn = n;
      const double rho = rho_dn(d, n);
      const double eta = f_dn(d, n, rho);
      const double lower = lambda * (1 - 1 / dd) * std::pow(nn + 1, -dd / (dd + 1));
      const double upper = lambda * (1 - 1 / dd) * std::pow(nn, -dd / (dd + 1));
      const double s1 = std::min(eta - lower, upper - eta) / eta;
      sandwich.worst = std::min(sandwich.worst, s1);
      if (!(lower <= eta && eta <= upper && upper < 1.0)) {
        sandwich.pass = false;
        sandwich.detail += "d=" + std::to_string(d) + ",n=" + std::to_string(n) + " ";
      }
      const double inv = std::pow(eta, -(dd + 1));
      const double base = dd * std::pow(nn, dd);
      const double s2 = std::min(inv / (e * base) - 1, 32 * e * base / inv - 1);
      power.worst = std::min(power.worst, s2);
      if (!(e * base <= inv && inv <= 32 * e * base)) {
        power.pass = false;
        power.detail += "d=" + std::to_string(d) + ",n=" + std::to_string(n) + " ";
      }
      below.worst = std::min(below.worst, lambda - rho);
      if (!(rho < lambda)) below.pass = false;
    }
  }
  return {sandwich, power, below};
}

}  // namespace treegibbs
