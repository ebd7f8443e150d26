#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

std::vector<double> brute_convolve(const GroupSpace& s, std::span<const double> f,
                                   std::span<const double> g) {
  std::vector<double> out(s.size(), 0.0);
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = 0; b < s.size(); ++b) {
      Element diff = s.element(a) - s.element(b);
      if (s.is_cyclic()) {
        const Element q = s.modulus();
        diff = ((diff % q) + q) % q;
      } else if (diff < -s.radius() || diff > s.radius()) {
        continue;
      }
      out[a] += f[s.index(diff)] * g[b];
    }
  return out;
}

double naive_zeta(double s, long N) {
  double sum = 0.0;
  for (long k = N; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
  return sum + std::pow(N + 0.5, 1.0 - s) / (s - 1.0);
}

double golden_max(const std::function<double(double)>& fn, double a, double b) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = fn(c), fd = fn(d);
  while (b - a > 1e-15 * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = fn(d);
    }
    if (c >= d) break;
  }
  return 0.5 * (a + b);
}

double illinois_root(const std::function<double(double)>& fn, double a, double b) {
  double fa = fn(a), fb = fn(b);
  if (fa * fb > 0) throw std::invalid_argument("illinois_root: no sign change");
  int side = 0;
  for (int it = 0; it < 500; ++it) {
    const double c = (a * fb - b * fa) / (fb - fa);
    const double fc = fn(c);
    if (fc == 0.0 || std::abs(b - a) < 1e-16) return c;
    if (fc * fb > 0) {
      b = c;
      fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
    if (std::abs(b - a) < 1e-15 * std::max(1.0, std::abs(c))) return c;
  }
  return 0.5 * (a + b);
}

double f_dn(int d, int n, double r) {
  return (r - std::pow(r, d)) / std::pow(std::pow(r, d + 1) + n, d / (d + 1.0));
}

double rho(int d, int n) {
  return golden_max([=](double r) { return f_dn(d, n, r); }, 0.0, 1.0);
}

double eta(int d, int n) { return f_dn(d, n, rho(d, n)); }

double r_star(int d, int n) {
  const double lambda = std::pow(static_cast<double>(d), -1.0 / (d - 1));
  auto g = [=](double r) {
    const double base = std::pow(lambda / r, (d * d - 1) / 2.0) - 1.0;
    return std::pow(std::max(base, 0.0), 2.0 / (d + 1));
  };
  return illinois_root([&](double r) { return f_dn(d, n, r) - g(r); }, 1e-3, lambda);
}

double sos_deviation_sum(double beta, int d, long N) {
  const double p = (d + 1) / 2.0;
  double s = 0.0;
  for (long i = N; i >= 1; --i) s += 2.0 * std::exp(-beta * p * static_cast<double>(i));
  return std::pow(s, 1.0 / p);
}

double log_deviation_sum(double beta, int d) {
  const double p = (d + 1) / 2.0;
  return std::pow(2.0 * (naive_zeta(beta * p) - 1.0), 1.0 / p);
}

double sos_threshold(int d, int n) {
  const double e = eta(d, n);
  return illinois_root([&](double b) { return sos_deviation_sum(b, d) - e; }, 0.05, 20.0);
}

double log_threshold(int d, int n) {
  const double e = eta(d, n);
  const double lo = 1.0 / ((d + 1) / 2.0) * 1.05;
  return illinois_root([&](double b) { return log_deviation_sum(b, d) - e; }, lo, 40.0);
}

std::vector<double> gauss_solve(std::vector<double> M, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(M[r * n + k]) > std::abs(M[piv * n + k])) piv = r;
    if (M[piv * n + k] == 0.0) throw std::runtime_error("gauss_solve: singular");
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(M[k * n + c], M[piv * n + c]);
      std::swap(b[k], b[piv]);
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      const double m = M[r * n + k] / M[k * n + k];
      if (m == 0.0) continue;
      for (std::size_t c = k; c < n; ++c) M[r * n + c] -= m * M[k * n + c];
      b[r] -= m * b[k];
    }
  }
  std::vector<double> y(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t c = k + 1; c < n; ++c) s -= M[k * n + c] * y[c];
    y[k] = s / M[k * n + k];
  }
  return y;
}

std::vector<double> newton_boundary_law(const treegibbs::TransferOperator& Q, int d,
                                        std::span<const Element> A, int max_iter,
                                        double tol) {
  const GroupSpace& s = Q.space();
  const std::size_t n = s.size();
  auto kernel = [&](std::size_t i, std::size_t j) {
    Element diff = s.element(i) - s.element(j);
    if (s.is_cyclic()) {
      const Element q = s.modulus();
      diff = ((diff % q) + q) % q;
    } else if (diff < -s.radius() || diff > s.radius()) {
      return 0.0;
    }
    return Q.table()[s.index(diff)];
  };
  std::vector<double> K(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) K[i * n + j] = kernel(i, j);

  std::vector<double> x(n, 0.0);
  for (Element a : A) x[s.index(a)] = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<double> F(n), J(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      double conv = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        conv += K[i * n + j] * std::pow(x[j], d);
        J[i * n + j] = -K[i * n + j] * d * std::pow(x[j], d - 1);
      }
      J[i * n + i] += 1.0;
      F[i] = x[i] - conv;
    }
    for (double& v : F) v = -v;
    const std::vector<double> step = gauss_solve(J, F);
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += step[i];
      m = std::max(m, std::abs(step[i]));
    }
    if (m < tol) break;
  }
  return x;
}

}  // namespace oracle
