#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "treegibbs/constants.hpp"
#include "treegibbs/error.hpp"
#include "treegibbs/potentials.hpp"
#include "treegibbs/solver.hpp"

using namespace treegibbs;

namespace {

LocalizationProblem sos_problem(double beta, std::int64_t L, std::vector<Element> A, int d = 2) {
  return LocalizationProblem{d, TransferOperator::sos(GroupSpace::window(L), beta), std::move(A)};
}

// (Q * (x0^d u x1^d)) restricted to A^c.
std::vector<double> apply_inner(const LocalizationProblem& p, std::span<const double> x0,
                                std::span<const double> x1) {
  const Partition part(p.space(), p.A);
  const SeqFn x = splice(x0, x1, part);
  const SeqFn y = convolve(p.Q.table(), pointwise_pow(x, p.d));
  return restrict_to(y, part.outside());
}

}  // namespace

TEST(Inner, IdentityKernelGivesZero) {
  LocalizationProblem p{2, TransferOperator::identity(GroupSpace::window(5)), {0, 2}};
  for (double v : {0.5, 0.8, 1.0}) {
    const std::vector<double> x1(2, v);
    const auto r = inner_fixed_point(p, x1);
    for (double x : r.x0) EXPECT_EQ(x, 0.0);
  }
}

TEST(Inner, SosStaysInBallWithSmallResidual) {
  const auto p = sos_problem(2.0, 40, {0});
  ASSERT_GE(2.0, sos_threshold(2, 1));
  const std::vector<double> x1{1.0};
  const auto r = inner_fixed_point(p, x1);
  const double eps = deviation_norm(p.Q, 2).value;
  EXPECT_LE(r.norm, solve_rq(2, 1, eps));
  const auto fx = apply_inner(p, r.x0, x1);
  double res = 0.0;
  for (std::size_t k = 0; k < fx.size(); ++k) res = std::max(res, std::abs(fx[k] - r.x0[k]));
  EXPECT_LT(res, 1e-11);
}

TEST(Inner, MonotoneInX1) {
  const auto p = sos_problem(2.4, 40, {-3, 4});
  const std::vector<double> lo{0.6, 0.7}, hi{0.65, 0.9};
  const auto a = inner_fixed_point(p, lo), b = inner_fixed_point(p, hi);
  for (std::size_t k = 0; k < a.x0.size(); ++k) EXPECT_LE(a.x0[k], b.x0[k] + 1e-15);
}

TEST(Inner, ContractionRateBelowBound) {
  const auto sol = solve(sos_problem(2.4, 60, {0, 5}));
  EXPECT_LE(sol.max_inner_ratio, sol.contraction_bound);
  EXPECT_LT(sol.contraction_bound, 1.0);
}

TEST(Inner, IterationLimitReported) {
  auto p = sos_problem(2.4, 60, {0, 5});
  p.max_iter = 2;
  EXPECT_THROW(solve(p), IterationLimit);
}

TEST(Outer, IdentityKernelFixedPointIsIndicator) {
  LocalizationProblem p{3, TransferOperator::identity(GroupSpace::cyclic(6)), {1, 4}};
  const auto r = outer_iteration(p);
  EXPECT_TRUE(r.bracket_closed);
  for (double v : r.x1) EXPECT_EQ(v, 1.0);
}

TEST(Outer, SingletonBracketCloses) {
  for (double beta : {2.0, 2.5, 4.0}) {
    const auto r = outer_iteration(sos_problem(beta, 40, {0}));
    EXPECT_TRUE(r.bracket_closed);
    EXPECT_LT(r.bracket_width, 1e-11);
  }
}

TEST(Outer, TwoPointSetAboveLambda) {
  const auto p = sos_problem(2.4, 60, {0, 5});
  const auto r = outer_iteration(p);
  ASSERT_TRUE(r.bracket_closed);
  for (double v : r.x1) EXPECT_GT(v, lambda_d(2));
  const auto g = outer_map(p, r.x1);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_LT(std::abs(g[k] - r.x1[k]), 1e-10);
}

TEST(Solve, IdentityKernelIsExact) {
  LocalizationProblem p{2, TransferOperator::identity(GroupSpace::window(6)), {-2, 0, 3}};
  const auto sol = solve(p);
  for (std::size_t k = 0; k < sol.xbar.size(); ++k) {
    const Element i = sol.xbar.space().element(k);
    EXPECT_EQ(sol.xbar[k], (i == -2 || i == 0 || i == 3) ? 1.0 : 0.0);
  }
  EXPECT_EQ(sol.residual, 0.0);
  EXPECT_TRUE(sol.all_pass());
}

TEST(Solve, SosAgreesWithNewtonOracle) {
  const auto p = sos_problem(2.4, 60, {0, 5});
  const auto sol = solve(p);
  const std::vector<Element> A{0, 5};
  const auto x = oracle::newton_boundary_law(p.Q, 2, A);
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(sol.xbar[k], x[k], 1e-10);
  // Frozen oracle output.
  EXPECT_NEAR(sol.xbar.at(0), 0.99815044239959, 1e-11);
  EXPECT_NEAR(sol.xbar.at(5), 0.99815044239959, 1e-11);
  EXPECT_NEAR(sol.xbar.at(1), 0.100689546876227, 1e-11);
  EXPECT_NEAR(sol.xbar.at(-1), 0.100593596672069, 1e-11);
  EXPECT_NEAR(sol.xbar.at(3), 0.0100650712195404, 1e-11);
  EXPECT_NEAR(sol.epsilon, 0.146690174261389, 1e-13);
}

TEST(Solve, SosCertificatePasses) {
  const auto sol = solve(sos_problem(2.4, 60, {0, 5}));
  EXPECT_LT(sol.residual, 1e-10);
  for (const auto& c : sol.checks) EXPECT_TRUE(c.pass) << c.name;
  const auto& k = sol.constants;
  const Partition part(sol.xbar.space(), sol.A);
  const auto x0 = restrict_to(sol.xbar, part.outside());
  const auto x1 = restrict_to(sol.xbar, part.inside());
  const double norm0 = lp_norm(x0, 3.0);
  EXPECT_LE(lp_norm(x0, kInfinity), norm0);
  EXPECT_LT(norm0, k.rho);
  EXPECT_LT(k.rho, k.lambda);
  for (double v : x1) {
    EXPECT_GT(v, k.lambda);
    EXPECT_LT(v, 1.0);
    EXPECT_LE(1 - v, k.k_inside * sol.epsilon);
  }
  EXPECT_LE(norm0, k.rho / k.eta * sol.epsilon);
  const auto Qop = TransferOperator::sos(GroupSpace::window(60), 2.4);
  const SeqFn& Q = Qop.table();
  for (std::size_t idx : part.outside()) {
    const Element i = sol.xbar.space().element(idx);
    const double mass = Q.at(i) + Q.at(i - 5);
    EXPECT_GE(sol.xbar[idx], (1 - k.k_lower * sol.epsilon) * mass);
  }
}

TEST(Solve, ClockModelOnZ5) {
  const auto fz = fuzzy_operator(TransferOperator::sos(GroupSpace::window(30), 2.4), 5);
  const double eps = deviation_norm(fz.op, 2).value;
  ASSERT_LE(eps, eta_dn(2, 2));
  const auto sol = solve(LocalizationProblem{2, fz.op, {0, 1}});
  EXPECT_TRUE(sol.all_pass());
  EXPECT_LT(sol.residual, 1e-10);
  const auto x = oracle::newton_boundary_law(fz.op, 2, std::vector<Element>{0, 1});
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(sol.xbar[k], x[k], 1e-10);
}

TEST(Solve, BelowThresholdIsRejected) {
  try {
    solve(sos_problem(1.5, 40, {0}));
    FAIL() << "expected ThresholdExceeded";
  } catch (const ThresholdExceeded& e) {
    EXPECT_GT(e.measured, e.required);
    EXPECT_NEAR(e.required, eta_dn(2, 1), 1e-15);
  }
}

TEST(Solve, RejectsBadSets) {
  EXPECT_THROW(solve(LocalizationProblem{2, TransferOperator::identity(GroupSpace::cyclic(3)),
                                         {0, 1, 2}}),
               InvalidArgument);
  EXPECT_THROW(solve(sos_problem(2.4, 10, {})), InvalidArgument);
}

TEST(Residual, IndicatorAndPerturbation) {
  const auto s = GroupSpace::window(5);
  const std::vector<Element> A{0, 2};
  EXPECT_EQ(residual(SeqFn::indicator(s, A), TransferOperator::identity(s), 3), 0.0);

  const auto p = sos_problem(2.4, 60, {0, 5});
  const auto sol = solve(p);
  std::vector<double> v(sol.xbar.values().begin(), sol.xbar.values().end());
  v[p.space().index(2)] += 0.01;
  EXPECT_GT(residual(SeqFn(p.space(), v), p.Q, 2), sol.residual);
  EXPECT_LT(sol.residual, 10 * p.tol_outer);
}

TEST(Solve, TranslationCovariantOnCycle) {
  const auto fz = fuzzy_operator(TransferOperator::sos(GroupSpace::window(30), 2.6), 7);
  const auto a = solve(LocalizationProblem{2, fz.op, {0, 2}});
  const auto& s = fz.op.space();
  for (Element t = 1; t < 7; ++t) {
    const auto b = solve(LocalizationProblem{2, fz.op, {s.add(0, t), s.add(2, t)}});
    for (Element i = 0; i < 7; ++i) EXPECT_NEAR(b.xbar.at(s.add(i, t)), a.xbar.at(i), 1e-10);
  }
}

TEST(Solve, TranslationCovariantAwayFromWindowEdge) {
  const auto a = solve(sos_problem(2.4, 60, {0}));
  const auto b = solve(sos_problem(2.4, 60, {3}));
  for (Element i = -25; i <= 25; ++i) EXPECT_NEAR(b.xbar.at(i + 3), a.xbar.at(i), 1e-12);
}

TEST(Solve, BoundaryLawIsXbarToTheD) {
  const auto sol = solve(sos_problem(2.4, 30, {0}, 3));
  const SeqFn u = sol.boundary_law();
  for (std::size_t k = 0; k < u.size(); ++k) EXPECT_DOUBLE_EQ(u[k], std::pow(sol.xbar[k], 3));
}

TEST(WindowRadius, CoversSetAndTail) {
  const std::vector<Element> A{0, 5};
  const auto L = default_window_radius(TransferOperator::Family::SOS, 2.4, 1.0, 2, A);
  EXPECT_GE(L, 5);
  const auto Q = TransferOperator::sos(GroupSpace::window(L), 2.4);
  EXPECT_LE(family_tail_norm(Q, 1.5), 1e-12);
}
