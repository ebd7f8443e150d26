#pragma once

// Transfer operators Q = exp(-beta U) on a state space, normalised to Q(0)=1,
// their deviation from the identity kernel, the fuzzy (mod q) operator, the
// Riemann zeta function and the strong-coupling thresholds in beta.

#include <optional>
#include <string>
#include <vector>

#include "treegibbs/seqspace.hpp"

namespace treegibbs {

class TransferOperator {
 public:
  enum class Family { SOS, Log, PSOS, Custom };

  /// e^{-beta |i|} on a window of Z.
  static TransferOperator sos(const GroupSpace& space, double beta);
  /// (1 + |i|)^{-beta} on a window of Z.
  static TransferOperator log(const GroupSpace& space, double beta);
  /// e^{-beta |i|^p} on a window of Z.
  static TransferOperator psos(const GroupSpace& space, double beta, double p);
  /// Tabulated operator. Must be symmetric, nonnegative and equal to 1 at 0;
  /// zero entries are accepted so that the identity kernel 1_{0} can be used.
  static TransferOperator custom(SeqFn table);
  static TransferOperator identity(const GroupSpace& space);

  Family family() const noexcept { return family_; }
  std::string family_name() const;
  double beta() const noexcept { return beta_; }
  double exponent() const noexcept { return p_; }
  const GroupSpace& space() const noexcept { return table_.space(); }
  /// Q restricted to the space; the kernel used by all convolutions.
  const SeqFn& table() const noexcept { return table_; }

  /// Closed-form value at any integer (families) or table value (custom,
  /// zero outside a window).
  double exact(Element i) const;

 private:
  TransferOperator(Family family, double beta, double p, SeqFn table);

  Family family_;
  double beta_;
  double p_;
  SeqFn table_;
};

/// Q(i) for i in the operator's space.
double evaluate(const TransferOperator& q, Element i);

/// -log Q(i - j). Requires Q(k) < 1 for k != 0.
double dist_q(const TransferOperator& q, Element i, Element j);

struct DeviationNorm {
  double exponent = 0;   // (d+1)/2
  double windowed = 0;   // ||Q - 1_{0}|| over the space
  double tail = 0;       // (sum_{|i|>L} Q(i)^p)^(1/p), zero on Z_q and tables
  double value = 0;      // combined norm over all of Z (or Z_q)
  std::optional<double> closed_form;  // SOS and Log only
};

/// eps = ||Q - 1_{0}||_{(d+1)/2}. Throws TruncationError when the part of the
/// norm outside the window exceeds tail_tolerance.
DeviationNorm deviation_norm(const TransferOperator& q, int d,
                             double tail_tolerance = 1e-12);

/// Norm of the tail sum_{|i|>L} Q(i)^p for a family operator on a window.
double family_tail_norm(const TransferOperator& q, double p);

/// Smallest window radius for which the (d+1)/2-norm tail of the family
/// operator is below tol.
std::int64_t tail_window_radius(TransferOperator::Family family, double beta,
                                double exponent, int d, double tol = 1e-12,
                                std::int64_t max_radius = 100000);

struct FuzzyOperator {
  TransferOperator op;              // normalised Q_q on Z_q, Q_q(0)=1
  std::vector<double> class_sums;   // unnormalised sum_{j = i mod q} Q(j)
  double zero_class = 1.0;          // unnormalised Q_q(0)
  double tail_mass = 0.0;           // l^1 mass of Q outside the window
};

/// Class-sum operator on Z_q built from Q on a window of Z.
FuzzyOperator fuzzy_operator(const TransferOperator& q, std::int64_t modulus,
                             double tail_tolerance = 1e-10);

/// sum_{k >= m} k^{-s} for s > 1, m >= 1.
double zeta_tail(double s, double m);
/// Riemann zeta on (1, inf).
double zeta(double s);
/// s in (1, inf) with zeta(s) = y, y > 1.
double zeta_inverse(double y);

/// Smallest beta for which the SOS operator satisfies eps <= eta(d, n).
double sos_threshold(int d, int n);
/// Same for the log potential.
double log_threshold(int d, int n);

}  // namespace treegibbs
