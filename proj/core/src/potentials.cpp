#include "treegibbs/potentials.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "bisect.hpp"
#include "treegibbs/constants.hpp"
#include "treegibbs/error.hpp"

namespace treegibbs {
namespace {

double family_value(TransferOperator::Family family, double beta, double p,
                    Element i) {
  const double a = std::abs(static_cast<double>(i));
  switch (family) {
    case TransferOperator::Family::SOS:
      return std::exp(-beta * a);
    case TransferOperator::Family::Log:
      return std::pow(1.0 + a, -beta);
    case TransferOperator::Family::PSOS:
      return std::exp(-beta * std::pow(a, p));
    case TransferOperator::Family::Custom:
      break;
  }
  throw InvalidArgument("family_value on a custom operator");
}

SeqFn family_table(const GroupSpace& space, TransferOperator::Family family,
                   double beta, double p) {
  if (space.is_cyclic())
    throw InvalidArgument(
        "parametric potentials live on a window of Z; use fuzzy_operator for Z_q");
  if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
  return SeqFn::from_function(
      space, [&](Element i) { return family_value(family, beta, p, i); });
}

// sum_{|i| > L} Q(i)^exponent for a family operator, before taking the root.
double family_tail_sum(TransferOperator::Family family, double beta, double p,
                       double exponent, std::int64_t radius) {
  const double L = static_cast<double>(radius);
  switch (family) {
    case TransferOperator::Family::SOS: {
      const double r = std::exp(-beta * exponent);
      return 2.0 * std::exp(-beta * exponent * (L + 1)) / (1.0 - r);
    }
    case TransferOperator::Family::Log: {
      const double s = beta * exponent;
      if (!(s > 1.0))
        throw TruncationError("log potential not summable: beta * exponent <= 1",
                              kInfinity);
      return 2.0 * zeta_tail(s, L + 2);
    }
    case TransferOperator::Family::PSOS: {
      double sum = 0.0;
      for (std::int64_t k = radius + 1; k < radius + 10000000; ++k) {
        const double term = std::exp(-beta * exponent * std::pow(double(k), p));
        sum += term;
        if (term == 0.0 || term < 1e-18 * sum) break;
      }
      return 2.0 * sum;
    }
    case TransferOperator::Family::Custom:
      return 0.0;
  }
  return 0.0;
}

}  // namespace

TransferOperator::TransferOperator(Family family, double beta, double p,
                                   SeqFn table)
    : family_(family), beta_(beta), p_(p), table_(std::move(table)) {}

TransferOperator TransferOperator::sos(const GroupSpace& space, double beta) {
  return {Family::SOS, beta, 1.0, family_table(space, Family::SOS, beta, 1.0)};
}

TransferOperator TransferOperator::log(const GroupSpace& space, double beta) {
  return {Family::Log, beta, 0.0, family_table(space, Family::Log, beta, 0.0)};
}

TransferOperator TransferOperator::psos(const GroupSpace& space, double beta,
                                        double p) {
  if (!(p > 0.0)) throw InvalidArgument("p-SOS exponent must be positive");
  return {Family::PSOS, beta, p, family_table(space, Family::PSOS, beta, p)};
}

TransferOperator TransferOperator::custom(SeqFn table) {
  const GroupSpace& space = table.space();
  std::vector<double> v(table.values().begin(), table.values().end());
  double peak = 0.0;
  for (double x : v) {
    if (x < 0.0) throw InvalidArgument("transfer operator must be nonnegative");
    peak = std::max(peak, x);
  }
  const std::size_t zero = space.index(0);
  if (std::abs(v[zero] - 1.0) > 1e-12)
    throw InvalidArgument("transfer operator must satisfy Q(0) = 1");
  v[zero] = 1.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::size_t m = space.index(space.neg(space.element(k)));
    if (std::abs(v[k] - v[m]) > 1e-12 * peak)
      throw InvalidArgument("transfer operator must be symmetric");
    if (k < m) v[k] = v[m] = 0.5 * (v[k] + v[m]);
  }
  return {Family::Custom, 0.0, 0.0, SeqFn(space, std::move(v))};
}

TransferOperator TransferOperator::identity(const GroupSpace& space) {
  const std::array<Element, 1> zero{0};
  return custom(SeqFn::indicator(space, zero));
}

std::string TransferOperator::family_name() const {
  switch (family_) {
    case Family::SOS: return "sos";
    case Family::Log: return "log";
    case Family::PSOS: return "psos";
    case Family::Custom: return "custom";
  }
  return "custom";
}

double TransferOperator::exact(Element i) const {
  if (family_ == Family::Custom) return table_.at(space().reduce(i));
  return family_value(family_, beta_, p_, i);
}

double evaluate(const TransferOperator& q, Element i) {
  if (!q.space().contains(i))
    throw InvalidArgument("evaluate: element outside the operator's space");
  return q.table().at(q.space().reduce(i));
}

double dist_q(const TransferOperator& q, Element i, Element j) {
  const GroupSpace& s = q.space();
  const Element diff = s.sub(i, j);
  if (diff == 0) return 0.0;
  const double value = q.exact(diff);
  if (value >= 1.0)
    throw InvalidArgument("dist_q requires Q(k) < 1 for k != 0");
  return -std::log(value);
}

double family_tail_norm(const TransferOperator& q, double p) {
  if (q.family() == TransferOperator::Family::Custom || q.space().is_cyclic())
    return 0.0;
  const double sum =
      family_tail_sum(q.family(), q.beta(), q.exponent(), p, q.space().radius());
  return std::pow(sum, 1.0 / p);
}

DeviationNorm deviation_norm(const TransferOperator& q, int d,
                             double tail_tolerance) {
  if (d < 2) throw InvalidArgument("tree order d must be >= 2");
  DeviationNorm out;
  const double p = (d + 1) / 2.0;
  out.exponent = p;

  std::vector<double> dev(q.table().values().begin(), q.table().values().end());
  dev[q.space().index(0)] -= 1.0;
  out.windowed = lp_norm(dev, p);
  out.tail = family_tail_norm(q, p);
  out.value = std::pow(std::pow(out.windowed, p) + std::pow(out.tail, p), 1.0 / p);

  const double s = q.beta() * p;
  if (q.family() == TransferOperator::Family::SOS)
    out.closed_form = std::pow(2.0 / std::expm1(s), 1.0 / p);
  else if (q.family() == TransferOperator::Family::Log && s > 1.0)
    out.closed_form = std::pow(2.0 * zeta_tail(s, 2.0), 1.0 / p);

  if (out.tail > tail_tolerance) {
    std::ostringstream os;
    os << "deviation norm tail " << out.tail << " outside " << q.space().describe()
       << " exceeds tolerance " << tail_tolerance;
    throw TruncationError(os.str(), out.tail);
  }
  return out;
}

std::int64_t tail_window_radius(TransferOperator::Family family, double beta,
                                double exponent, int d, double tol,
                                std::int64_t max_radius) {
  if (family == TransferOperator::Family::Custom)
    throw InvalidArgument("tail_window_radius needs a parametric family");
  const double p = (d + 1) / 2.0;
  auto tail = [&](std::int64_t L) {
    return std::pow(family_tail_sum(family, beta, exponent, p, L), 1.0 / p);
  };
  std::int64_t hi = 1;
  while (tail(hi) > tol) {
    if (hi >= max_radius)
      throw TruncationError("no window radius below the limit meets the tail tolerance",
                            tail(hi));
    hi = std::min(2 * hi, max_radius);
  }
  std::int64_t lo = hi / 2;
  if (lo < 1) return 1;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (tail(mid) > tol) lo = mid;
    else hi = mid;
  }
  return hi;
}

FuzzyOperator fuzzy_operator(const TransferOperator& q, std::int64_t modulus,
                             double tail_tolerance) {
  const GroupSpace& base = q.space();
  if (base.is_cyclic())
    throw InvalidArgument("fuzzy_operator expects an operator on a window of Z");
  const GroupSpace cyc = GroupSpace::cyclic(modulus);

  FuzzyOperator out{TransferOperator::identity(cyc), {}, 1.0, 0.0};
  out.class_sums.assign(cyc.size(), 0.0);
  for (std::size_t k = 0; k < base.size(); ++k)
    out.class_sums[cyc.index(base.element(k))] += q.table()[k];
  // Pair up classes i and -i so that rounding order cannot break symmetry.
  for (std::size_t k = 0; k < cyc.size(); ++k) {
    const std::size_t m = cyc.index(cyc.neg(cyc.element(k)));
    if (k < m)
      out.class_sums[k] = out.class_sums[m] =
          0.5 * (out.class_sums[k] + out.class_sums[m]);
  }
  out.tail_mass = family_tail_norm(q, 1.0);
  if (out.tail_mass > tail_tolerance) {
    std::ostringstream os;
    os << "l1 tail " << out.tail_mass << " of Q outside " << base.describe()
       << " exceeds tolerance " << tail_tolerance;
    throw TruncationError(os.str(), out.tail_mass);
  }
  out.zero_class = out.class_sums[0];
  std::vector<double> normalized(out.class_sums);
  for (double& v : normalized) v /= out.zero_class;
  normalized[0] = 1.0;
  out.op = TransferOperator::custom(SeqFn(cyc, std::move(normalized)));
  return out;
}

double zeta_tail(double s, double m) {
  if (!(s > 1.0)) throw InvalidArgument("zeta requires s > 1");
  if (!(m >= 1.0)) throw InvalidArgument("zeta_tail requires m >= 1");
  // Direct summation up to N, then Euler-Maclaurin for sum_{k >= N} k^{-s}:
  // integral N^{1-s}/(s-1), half end term, Bernoulli corrections.
  const double start = std::floor(m);
  const double N = std::max(start, 16.0);
  double sum = 0.0;
  for (double k = start; k < N; k += 1.0) sum += std::pow(k, -s);

  static constexpr std::array<double, 7> kB2j = {
      1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6};
  double tail = std::pow(N, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(N, -s);
  // term_j = B_2j / (2j)! * s (s+1) ... (s+2j-2) * N^{-s-2j+1}
  double rising = s;  // s (s+1) ... (s+2j-2)
  double factorial = 2.0;
  double power = std::pow(N, -s - 1.0);
  for (std::size_t j = 0; j < kB2j.size(); ++j) {
    tail += kB2j[j] / factorial * rising * power;
    const double a = s + 2.0 * j + 1.0;
    rising *= a * (a + 1.0);
    factorial *= (2.0 * j + 3.0) * (2.0 * j + 4.0);
    power /= N * N;
  }
  return sum + tail;
}

double zeta(double s) { return zeta_tail(s, 1.0); }

double zeta_inverse(double y) {
  if (!(y > 1.0)) throw InvalidArgument("zeta_inverse requires y > 1");
  // zeta(s) > 1/(s-1), so s = 1 + 1/y gives zeta(s) > y.
  const double lo = 1.0 + 1.0 / y;
  double hi = 2.0;
  while (zeta(hi) > y) hi *= 2.0;
  return detail::bisect([&](double s) { return zeta(s) - y; }, lo, hi);
}

double sos_threshold(int d, int n) {
  const double eta = eta_dn(d, n);
  const double e = (d + 1) / 2.0;
  return (2.0 / (d + 1)) * std::log1p(2.0 * std::pow(eta, -e));
}

double log_threshold(int d, int n) {
  const double eta = eta_dn(d, n);
  const double e = (d + 1) / 2.0;
  return (2.0 / (d + 1)) * zeta_inverse(1.0 + 0.5 * std::pow(eta, e));
}

}  // namespace treegibbs
