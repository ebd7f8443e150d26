#pragma once

// Integer-valued gradient measures from a Z_q-valued ("fuzzy") chain.
// First a fuzzy configuration is drawn from the chain built on the class-sum
// operator Q_q; then every edge whose fuzzy endpoints differ by b gets an
// integer increment j = b mod q with probability Q(j) / Q^q(b), where Q^q is
// the unnormalised class sum.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "treegibbs/gibbs.hpp"
#include "treegibbs/potentials.hpp"
#include "treegibbs/random.hpp"
#include "treegibbs/solver.hpp"

namespace treegibbs {

struct FuzzyOptions {
  double tol_inner = 1e-13;
  double tol_outer = 1e-11;
  int max_iter = 100000;
  /// Largest accepted l^1 mass of Q outside the window.
  double tail_tolerance = 1e-10;
};

struct IncrementKernel {
  Element cls = 0;                // residue class b in Z_q
  std::vector<Element> support;   // window elements j = b mod q
  std::vector<double> weights;    // Q(j) / (window class sum); sums to 1
  double tail_bound = 0;          // relative mass that the window drops, at most
};

struct FuzzyChain {
  std::int64_t q = 2;
  int d = 2;
  TransferOperator base_Q;        // on a window of Z
  FuzzyOperator fuzzy;            // Q_q, normalised, and its class sums
  BoundaryLawSolution solution;
  MarkovChainGibbs chain;
  double epsilon = 0;             // ||Q_q - 1_{0}||_{(d+1)/2}
  double eta = 0;                 // eta(d, |A|)
  std::vector<IncrementKernel> kernels;  // one per class
  std::vector<DiscreteSampler> kernel_samplers;
  DiscreteSampler root_sampler;               // pi
  std::vector<DiscreteSampler> row_samplers;  // rows of P
};

/// Solves on Z_q for A and builds the chain and increment kernels.
/// Throws ThresholdExceeded when ||Q_q - 1_{0}|| > eta(d, |A|).
FuzzyChain build_fuzzy_chain(const TransferOperator& Q, std::int64_t q, int d,
                             std::vector<Element> A, const FuzzyOptions& opt = {});

const IncrementKernel& increment_kernel(const FuzzyChain& fc, Element cls);

/// Probability of increment c under the kernel of its class.
double kernel_probability(const FuzzyChain& fc, Element c);

struct PathSample {
  std::vector<Element> fuzzy_states;  // n+1 values in Z_q
  std::vector<Element> increments;    // n integer increments
  std::vector<Element> W;             // partial sums, W[0] = 0
};

PathSample sample_branch(const FuzzyChain& fc, int n, Rng& g);
/// Branch from stream 0 of seed.
PathSample sample_branch(const FuzzyChain& fc, int n, std::uint64_t seed);
/// count branches; branch b uses stream b of seed.
std::vector<PathSample> sample_branches(const FuzzyChain& fc, int n,
                                        std::size_t count, std::uint64_t seed);

/// Checks every increment against the fuzzy step and W_n against the
/// endpoints; returns the number of violations.
std::size_t congruence_violations(const FuzzyChain& fc, const PathSample& s);

/// Exact law of the first increment W_1 at stationarity:
/// sum_{a,b} pi(a) P(a,b) rho(. | b - a), as a map from window index to mass.
std::vector<double> first_increment_law(const FuzzyChain& fc);

struct Estimate {
  double value = 0;
  double se = 0;  // standard error
};

struct DelocalizationPoint {
  int n = 0;
  Estimate p;  // P(W_n = k)
};

/// Monte Carlo estimates of P(W_n = k) along a branch, one independent
/// sample set per n.
std::vector<DelocalizationPoint> delocalization_stat(const FuzzyChain& fc,
                                                     std::span<const int> n_grid,
                                                     Element k, std::size_t samples,
                                                     std::uint64_t seed);

/// pi(a) pi(a+c)^{d/(d+1)} Q(c) / (Q^q * pi^{d/(d+1)})(a), Q^q unnormalised.
double pair_limit_formula(const FuzzyChain& fc, Element abar, Element c);

/// Per-branch frequency of (fuzzy_states[k], increments[k]) = (abar, c),
/// averaged over branches; standard error from the spread across branches.
Estimate pair_empirical(std::span<const PathSample> samples, std::int64_t q,
                        Element abar, Element c);

/// step,fuzzy,increment,W for one branch.
void write_path_csv(std::ostream& os, const PathSample& s);

}  // namespace treegibbs
