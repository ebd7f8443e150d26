#include "treegibbs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "treegibbs/error.hpp"

namespace treegibbs {
namespace {

struct Context {
  const LocalizationProblem& p;
  Partition part;
  int n;
  DeviationNorm dev;
  double eps;
  double r_q;
  long inner_total = 0;
  double max_ratio = 0;
};

Context make_context(const LocalizationProblem& p) {
  if (p.d < 2) throw InvalidArgument("tree order d must be >= 2");
  if (p.A.empty()) throw InvalidArgument("localization set A is empty");
  if (p.A.size() >= p.space().size())
    throw InvalidArgument("localization set must leave A^c nonempty");
  if (!(p.tol_inner > 0) || !(p.tol_outer > 0) || p.max_iter < 1)
    throw InvalidArgument("tolerances and max_iter must be positive");
  Partition part(p.space(), p.A);
  const int n = static_cast<int>(part.inside().size());
  DeviationNorm dev = deviation_norm(p.Q, p.d, p.tail_tolerance);
  const double r_q = solve_rq(p.d, n, dev.value);
  return Context{p, std::move(part), n, dev, dev.value, r_q};
}

// u = x0^d |_| x1^d
std::vector<double> powered_splice(const Context& c, std::span<const double> x0,
                                   std::span<const double> x1) {
  std::vector<double> u(c.p.space().size());
  for (std::size_t k = 0; k < x0.size(); ++k)
    u[c.part.outside()[k]] = std::pow(x0[k], c.p.d);
  for (std::size_t k = 0; k < x1.size(); ++k)
    u[c.part.inside()[k]] = std::pow(x1[k], c.p.d);
  return u;
}

InnerResult inner(Context& c, std::span<const double> x1) {
  const auto& space = c.p.space();
  const auto Q = c.p.Q.table().values();
  const auto outside = c.part.outside();
  const double p = c.p.d + 1.0;

  InnerResult r;
  r.x0.assign(outside.size(), 0.0);
  std::vector<double> u = powered_splice(c, r.x0, x1);
  std::vector<double> next(outside.size());
  std::vector<double> diff(outside.size());
  double prev_step = 0.0;
  for (int it = 1; it <= c.p.max_iter; ++it) {
    for (std::size_t k = 0; k < outside.size(); ++k)
      next[k] = convolve_at(space, Q, u, outside[k]);
    for (std::size_t k = 0; k < outside.size(); ++k) diff[k] = next[k] - r.x0[k];
    const double step = lp_norm(diff, p);
    // Ratios of steps near rounding level carry no information.
    if (prev_step > 1e-10) r.max_ratio = std::max(r.max_ratio, step / prev_step);
    prev_step = step;
    r.x0.swap(next);
    for (std::size_t k = 0; k < outside.size(); ++k)
      u[outside[k]] = std::pow(r.x0[k], c.p.d);
    r.iterations = it;
    r.last_step = step;
    if (step < c.p.tol_inner) {
      r.norm = lp_norm(r.x0, p);
      c.inner_total += it;
      c.max_ratio = std::max(c.max_ratio, r.max_ratio);
      return r;
    }
  }
  std::ostringstream os;
  os << "inner fixed point did not converge in " << c.p.max_iter
     << " iterations (last step " << prev_step << ")";
  throw IterationLimit(os.str());
}

// (q * u)(i) for i in A, without the diagonal term so nothing cancels.
std::vector<double> off_diagonal_on_A(const Context& c, std::vector<double> u) {
  const auto inside = c.part.inside();
  std::vector<double> v(inside.size());
  for (std::size_t k = 0; k < inside.size(); ++k) {
    const double keep = u[inside[k]];
    u[inside[k]] = 0.0;
    v[k] = convolve_at(c.p.space(), c.p.Q.table().values(), u, inside[k]);
    u[inside[k]] = keep;
  }
  return v;
}

std::vector<double> apply_G(Context& c, std::span<const double> x1) {
  const InnerResult in = inner(c, x1);
  const std::vector<double> v = off_diagonal_on_A(c, powered_splice(c, in.x0, x1));
  const double mu = mu_d(c.p.d);
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!(v[k] < mu)) {
      std::ostringstream os;
      os << "q * x^d reached mu_d on A (" << v[k] << " >= " << mu << ")";
      throw PostconditionViolation(os.str());
    }
    out[k] = psi_d(c.p.d, v[k]);
  }
  return out;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

OuterResult outer(Context& c) {
  OuterResult r;
  std::vector<double> u(static_cast<std::size_t>(c.n), 1.0);
  for (int it = 1; it <= c.p.max_iter; ++it) {
    const std::vector<double> l = apply_G(c, u);
    r.outer_iterations = it;
    r.bracket_width = max_abs_diff(u, l);
    if (r.bracket_width < c.p.tol_outer) {
      r.x1.resize(u.size());
      for (std::size_t k = 0; k < u.size(); ++k) r.x1[k] = 0.5 * (u[k] + l[k]);
      r.residual = max_abs_diff(apply_G(c, r.x1), r.x1);
      r.bracket_closed = true;
      break;
    }
    std::vector<double> u_next = apply_G(c, l);
    const double move = max_abs_diff(u_next, u);
    u.swap(u_next);
    // Both monotone sequences have stalled with a gap between them.
    if (move < 1e-3 * c.p.tol_outer) {
      r.x1 = u;
      r.residual = max_abs_diff(apply_G(c, u), u);
      break;
    }
    if (it == c.p.max_iter) {
      std::ostringstream os;
      os << "outer iteration did not settle in " << c.p.max_iter
         << " iterations (bracket width " << r.bracket_width << ")";
      throw IterationLimit(os.str());
    }
  }
  r.inner_iterations = c.inner_total;
  r.max_inner_ratio = c.max_ratio;
  return r;
}

BoundCheck check_le(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, measured <= bound};
}

BoundCheck check_lt(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, measured < bound};
}

}  // namespace

bool BoundaryLawSolution::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const BoundCheck& b) { return b.pass; });
}

SeqFn BoundaryLawSolution::boundary_law() const { return pointwise_pow(xbar, d); }

InnerResult inner_fixed_point(const LocalizationProblem& problem,
                              std::span<const double> x1) {
  Context c = make_context(problem);
  if (x1.size() != c.part.inside().size())
    throw InvalidArgument("x1 must have one value per element of A");
  const double lambda = lambda_d(problem.d);
  for (double v : x1)
    if (v < lambda || v > 1.0)
      throw InvalidArgument("x1 must take values in [lambda_d, 1]");
  return inner(c, x1);
}

std::vector<double> outer_map(const LocalizationProblem& problem,
                              std::span<const double> x1) {
  Context c = make_context(problem);
  if (x1.size() != c.part.inside().size())
    throw InvalidArgument("x1 must have one value per element of A");
  return apply_G(c, x1);
}

OuterResult outer_iteration(const LocalizationProblem& problem) {
  Context c = make_context(problem);
  return outer(c);
}

double residual(const SeqFn& x, const TransferOperator& Q, int d) {
  if (!(x.space() == Q.space()))
    throw InvalidArgument("residual: x and Q live on different spaces");
  const SeqFn u = pointwise_pow(x, d);
  const SeqFn conv = convolve(Q.table(), u);
  std::vector<double> diff(x.size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = x[k] - conv[k];
  return lp_norm(diff, d + 1.0);
}

BoundaryLawSolution solve(const LocalizationProblem& problem) {
  Context c = make_context(problem);
  const OuterResult out = outer(c);
  if (!out.bracket_closed) {
    std::ostringstream os;
    os << "monotone bracket for the outer map stalled at width "
       << out.bracket_width << " >= tol_outer " << problem.tol_outer;
    throw BracketOpen(os.str(), out.bracket_width);
  }
  const InnerResult in = inner(c, out.x1);

  BoundaryLawSolution sol{
      problem.d,
      std::vector<Element>(c.part.set().begin(), c.part.set().end()),
      splice(in.x0, out.x1, c.part),
      c.eps,
      c.dev,
      theorem_constants(problem.d, c.n),
      c.r_q,
      0.0,
      out.outer_iterations,
      c.inner_total,
      out.bracket_width,
      out.residual,
      c.max_ratio,
      0.0,
      {}};
  sol.residual = residual(sol.xbar, problem.Q, problem.d);
  const double dd = problem.d;
  sol.contraction_bound =
      dd * std::pow(1.0 + std::pow(c.eps, (dd + 1) / 2), 2 / (dd + 1)) *
      std::pow(c.r_q, dd - 1);
  sol.checks = certify(problem, sol);

  if (!sol.all_pass()) {
    std::ostringstream os;
    os << "solution fails:";
    for (const auto& b : sol.checks)
      if (!b.pass) os << " [" << b.name << ": " << b.measured << " vs " << b.bound << "]";
    throw PostconditionViolation(os.str());
  }
  return sol;
}

std::vector<BoundCheck> certify(const LocalizationProblem& problem,
                                const BoundaryLawSolution& sol) {
  const Partition part(problem.space(), sol.A);
  const int d = sol.d;
  const auto& k = sol.constants;
  const double eps = sol.epsilon;
  const auto x = sol.xbar.values();
  const std::vector<double> x0 = restrict_to(x, part.outside());
  const std::vector<double> x1 = restrict_to(x, part.inside());
  const double sup0 = lp_norm(x0, kInfinity);
  const double norm0 = lp_norm(x0, d + 1.0);
  const double min1 = *std::min_element(x1.begin(), x1.end());
  const double max1 = *std::max_element(x1.begin(), x1.end());
  double gap1 = 0.0;
  for (double v : x1) gap1 = std::max(gap1, 1.0 - v);

  std::vector<BoundCheck> out;
  out.push_back(check_lt("residual < 10 tol_outer", sol.residual,
                         10 * problem.tol_outer));
  out.push_back(check_le("sup x|A^c <= ||x|A^c||", sup0, norm0));
  out.push_back(check_lt("||x|A^c|| < rho", norm0, k.rho));
  out.push_back(check_lt("rho < lambda", k.rho, k.lambda));
  out.push_back(check_lt("lambda < x|A", k.lambda, min1));
  // With eps = 0 the solution is exactly 1_A, so x|A = 1 is the only option.
  if (eps > 0) out.push_back(check_lt("x|A < 1", max1, 1.0));
  else out.push_back(check_le("x|A <= 1", max1, 1.0));
  out.push_back(check_le("outside: ||x|A^c|| <= (rho/eta) eps", norm0, k.k_outside * eps));
  out.push_back(check_le("inside: 1 - x|A <= k eps", gap1, k.k_inside * eps));

  // Lower bound off A as a ratio x(i) / sum_A Q(i-j) against 1 - k_lower eps.
  const double floor3 = 1.0 - k.k_lower * eps;
  double worst3 = kInfinity;
  const auto& space = problem.space();
  const auto& table = problem.Q.table();
  for (std::size_t idx : part.outside()) {
    double s = 0.0;
    for (Element a : part.set()) s += table.at(space.sub(space.element(idx), a));
    if (s > 0.0) worst3 = std::min(worst3, x[idx] / s);
  }
  if (std::isinf(worst3)) worst3 = std::max(floor3, 0.0);
  out.push_back({"outside, lower: x(i) >= (1 - k eps) sum_A Q(i-j)", worst3, floor3,
                 worst3 >= floor3});

  out.push_back(check_le("||x|A^c|| <= r_q", norm0, sol.r_q));

  // 0 <= q * x^d < mu_d on A.
  std::vector<double> u(x.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::pow(x[i], d);
  double claim = 0.0;
  bool nonneg = true;
  for (std::size_t idx : part.inside()) {
    const double keep = u[idx];
    u[idx] = 0.0;
    const double v = convolve_at(space, table.values(), u, idx);
    u[idx] = keep;
    claim = std::max(claim, v);
    nonneg = nonneg && v >= 0.0;
  }
  BoundCheck c515 = check_lt("0 <= q * x^d < mu_d on A", claim, k.mu);
  c515.pass = c515.pass && nonneg;
  out.push_back(c515);

  out.push_back(check_le("inner step ratio <= contraction bound",
                         sol.max_inner_ratio, sol.contraction_bound));
  out.push_back(check_lt("contraction bound < 1", sol.contraction_bound, 1.0));
  return out;
}

std::int64_t default_window_radius(TransferOperator::Family family, double beta,
                                   double exponent, int d,
                                   std::span<const Element> A, double tol) {
  std::int64_t reach = 0;
  for (Element a : A) reach = std::max<std::int64_t>(reach, a < 0 ? -a : a);
  return reach + tail_window_radius(family, beta, exponent, d, tol);
}

}  // namespace treegibbs
