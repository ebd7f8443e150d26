#pragma once

// Localized solutions of the normalised boundary-law equation x = Q * x^d.
//
// The unknown is split as x = x0 on A^c and x1 on A. For fixed x1 the map
// F_{x1}(x0) = (Q * (x0^d |_| x1^d))|_{A^c} is a contraction on a small ball;
// its fixed point xi0(x1) feeds the outer map
//   G(x1) = psi_d((q * (xi0(x1)^d |_| x1^d))|_A),   q = Q - 1_{0},
// whose fixed point gives the solution. G is monotone decreasing, so G o G
// is increasing and the iterates u_k = (G o G)^k(1) and l_k = G(u_k) bracket
// every fixed point.

#include <cstdint>
#include <string>
#include <vector>

#include "treegibbs/constants.hpp"
#include "treegibbs/potentials.hpp"
#include "treegibbs/seqspace.hpp"

namespace treegibbs {

struct LocalizationProblem {
  int d = 2;
  TransferOperator Q;  // its space is the state space
  std::vector<Element> A;
  double tol_inner = 1e-13;
  double tol_outer = 1e-11;
  int max_iter = 100000;
  /// Largest accepted (d+1)/2-norm of Q outside the window.
  double tail_tolerance = 1e-12;

  const GroupSpace& space() const noexcept { return Q.space(); }
};

/// Result of the inner contraction for one x1.
struct InnerResult {
  std::vector<double> x0;  // on A^c, in Partition::outside() order
  int iterations = 0;
  double last_step = 0;    // (d+1)-norm of the final update
  double max_ratio = 0;    // largest observed step ratio ||D_{k+1}|| / ||D_k||
  double norm = 0;         // ||x0||_{d+1}
};

struct OuterResult {
  std::vector<double> x1;  // on A, in Partition::inside() order
  bool bracket_closed = false;
  double bracket_width = 0;   // max_A (u - l)
  double residual = 0;        // ||G(x1) - x1||_inf
  int outer_iterations = 0;
  long inner_iterations = 0;  // summed over every G evaluation
  double max_inner_ratio = 0;
};

/// One named check of a solution or measure bound.
struct BoundCheck {
  std::string name;
  double measured = 0;
  double bound = 0;
  bool pass = false;
};

struct BoundaryLawSolution {
  int d = 2;
  std::vector<Element> A;  // sorted by index
  SeqFn xbar;
  double epsilon = 0;      // deviation norm used in all bounds
  DeviationNorm deviation;
  ModelConstants constants;
  double r_q = 0;
  double residual = 0;     // ||xbar - Q * xbar^d||_{d+1}
  int outer_iterations = 0;
  long inner_iterations = 0;
  double bracket_width = 0;
  double outer_residual = 0;
  double max_inner_ratio = 0;
  double contraction_bound = 0;  // d (1 + eps^{(d+1)/2})^{2/(d+1)} r_q^{d-1}
  std::vector<BoundCheck> checks;

  bool all_pass() const;
  /// u = xbar^d.
  SeqFn boundary_law() const;
};

/// xi0(x1): fixed point of F_{x1} started from x0 = 0.
/// x1 holds values on A in increasing index order, each in [lambda_d, 1].
InnerResult inner_fixed_point(const LocalizationProblem& problem,
                              std::span<const double> x1);

/// The outer map G itself.
std::vector<double> outer_map(const LocalizationProblem& problem,
                              std::span<const double> x1);

/// Monotone bracketing iteration of G. Does not throw on an open bracket:
/// the result then carries bracket_closed = false and the upper iterate.
OuterResult outer_iteration(const LocalizationProblem& problem);

/// Full solve with certification. Throws BracketOpen, ThresholdExceeded,
/// IterationLimit, TruncationError or PostconditionViolation.
BoundaryLawSolution solve(const LocalizationProblem& problem);

/// ||x - Q * x^d||_{d+1}.
double residual(const SeqFn& x, const TransferOperator& Q, int d);

/// Evaluates the ordering, the a-priori bounds on x and the related properties
/// on a converged solution; used by solve().
std::vector<BoundCheck> certify(const LocalizationProblem& problem,
                                const BoundaryLawSolution& sol);

/// max|a| + the smallest radius at which the family tail drops below tol.
std::int64_t default_window_radius(TransferOperator::Family family, double beta,
                                   double exponent, int d,
                                   std::span<const Element> A,
                                   double tol = 1e-12);

}  // namespace treegibbs
