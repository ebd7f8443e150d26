#pragma once

// Markov-chain Gibbs measure induced by a solution xbar of x = Q * x^d:
//   pi(i)   = xbar(i)^{d+1} / ||xbar||_{d+1}^{d+1}
//   P(i, j) = xbar(j)^d Q(i - j) / xbar(i)
//   Delta(i) = P(i, i) = xbar(i)^{d-1}
// plus the checks, finite-volume marginals and the tree sampler built on it.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "treegibbs/potentials.hpp"
#include "treegibbs/random.hpp"
#include "treegibbs/seqspace.hpp"
#include "treegibbs/solver.hpp"

namespace treegibbs {

class MarkovChainGibbs {
 public:
  static MarkovChainGibbs from_boundary_law(const BoundaryLawSolution& sol,
                                            const TransferOperator& Q);

  const GroupSpace& space() const noexcept { return Q_.space(); }
  int d() const noexcept { return d_; }
  const TransferOperator& Q() const noexcept { return Q_; }
  const SeqFn& xbar() const noexcept { return xbar_; }
  const SeqFn& pi() const noexcept { return pi_; }
  /// Localization set of the source solution.
  const std::vector<Element>& A() const noexcept { return A_; }
  double solver_residual() const noexcept { return residual_; }
  double epsilon() const noexcept { return epsilon_; }

  std::size_t size() const noexcept { return pi_.size(); }
  /// Row-major transition matrix indexed by space indices.
  const std::vector<double>& P() const noexcept { return P_; }
  double P(std::size_t i, std::size_t j) const { return P_[i * size() + j]; }
  std::span<const double> row(std::size_t i) const {
    return {P_.data() + i * size(), size()};
  }
  std::vector<double> delta() const;

 private:
  MarkovChainGibbs(int d, TransferOperator Q, SeqFn xbar, SeqFn pi,
                   std::vector<double> P, std::vector<Element> A,
                   double residual, double epsilon);

  int d_;
  TransferOperator Q_;
  SeqFn xbar_;
  SeqFn pi_;
  std::vector<double> P_;
  std::vector<Element> A_;
  double residual_;
  double epsilon_;
};

// Structural identities of the chain.

/// max_i |sum_j P(i,j) - 1| over rows with xbar(i) > 0.
double row_sum_defect(const MarkovChainGibbs& chain);
/// 10 * residual / min_{xbar > 0} xbar: the accepted row-sum defect.
double row_sum_tolerance(const MarkovChainGibbs& chain);
/// max_{i,j} |pi(i) P(i,j) - pi(j) P(j,i)|.
double reversibility_defect(const MarkovChainGibbs& chain);
/// Transition matrix from pi alone:
/// P(i,j) = pi(j)^{d/(d+1)} Q(i-j) / (Q * pi^{d/(d+1)})(i).
std::vector<double> transition_from_marginal(const MarkovChainGibbs& chain);
/// max |P - transition_from_marginal| over rows with pi(i) > 0.
double transition_formula_defect(const MarkovChainGibbs& chain);
/// Whether argmax_j P(i,j) = i for every i in A.
bool lazy_on_A(const MarkovChainGibbs& chain);

struct TheoremReport {
  double epsilon = 0;
  int n = 0;
  std::vector<BoundCheck> bounds;
  bool all_pass() const;
};

/// Evaluates the concentration (pi), laziness (Delta), the five quantitative
/// bounds and the jump bound P(i, A^c) <= c7 ||Q||_{d+1} eps^d /
/// (Q * pi^{d/(d+1)})(i) against the set A. A may differ from the set the
/// chain was built for (negative controls).
TheoremReport verify_theorem_bounds(const MarkovChainGibbs& chain,
                                    std::span<const Element> A, double epsilon);

// Finite volumes.

/// A finite subtree Lambda with its outer boundary. Interior vertices have
/// degree d+1; boundary vertices are leaves attached to the interior.
struct Subtree {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<char> boundary;  // 1 for vertices of the outer boundary

  /// One interior vertex (index 0) and its d+1 neighbours.
  static Subtree star(int d);
  /// Two adjacent interior vertices (0, 1) and their 2d other neighbours.
  static Subtree edge(int d);
  void validate(int d) const;
};

/// mu(sigma = omega on Lambda and its boundary), proportional to
/// prod_{boundary} u(omega_y) prod_{edges} Q(omega_y - omega_x), u = xbar^d,
/// normalised by exhaustive summation.
class FiniteVolumeMeasure {
 public:
  static constexpr double kMaxConfigurations = 5e7;

  FiniteVolumeMeasure(const BoundaryLawSolution& sol, const TransferOperator& Q,
                      Subtree tree);

  const Subtree& tree() const noexcept { return tree_; }
  double partition_function() const noexcept { return Z_; }
  /// omega lists one element per vertex.
  double probability(std::span<const Element> omega) const;
  /// log of the unnormalised weight; -inf where it vanishes.
  double log_weight(std::span<const Element> omega) const;
  /// Marginal law of one vertex, by space index.
  const std::vector<double>& vertex_marginal(int v) const { return vertex_[v]; }
  /// Joint law of the endpoints of edges[e], row-major by space index.
  const std::vector<double>& pair_marginal(int e) const { return pair_[e]; }

 private:
  double weight(std::span<const std::size_t> idx) const;

  Subtree tree_;
  GroupSpace space_;
  std::vector<double> Q_;  // Q by index difference
  std::vector<double> u_;
  int d_;
  double Z_ = 0;
  std::vector<std::vector<double>> vertex_;
  std::vector<std::vector<double>> pair_;
};

double finite_marginal(const BoundaryLawSolution& sol, const TransferOperator& Q,
                       const Subtree& tree, std::span<const Element> omega);

struct DlrReport {
  double max_violation = 0;       // max of the two below
  double chain_violation = 0;     // specification vs pi, P
  double finite_violation = 0;    // specification vs the finite-volume law
  std::size_t configurations = 0; // boundary configurations compared
  std::size_t skipped = 0;        // boundary configurations of zero measure
  bool exhaustive = false;
};

/// Single-vertex DLR check. For boundary configurations omega of the d+1
/// neighbours, compares gamma(sigma_x = i | omega) = prod_y Q(i - omega_y) / Z
/// with the chain's conditional law. All configurations are used when there
/// are at most max_exhaustive of them, otherwise `samples` drawn from seed.
DlrReport dlr_oracle_check(const MarkovChainGibbs& chain,
                           const BoundaryLawSolution& sol,
                           std::size_t max_exhaustive = 1000000,
                           std::size_t samples = 100000,
                           std::uint64_t seed = 1);

// Sampling on the rooted tree: the root has d+1 children, every later vertex
// d. Vertices are stored in breadth-first order.

struct TreeSample {
  int d = 2;
  int depth = 0;
  std::vector<Element> states;
  std::vector<int> level;
  std::vector<int> parent;  // -1 for the root
};

/// Number of vertices of the rooted tree of the given depth.
std::size_t tree_size(int d, int depth);
/// BFS levels and parents of the rooted tree.
void tree_shape(int d, int depth, std::vector<int>& level, std::vector<int>& parent);

class TreeSampler {
 public:
  explicit TreeSampler(const MarkovChainGibbs& chain);
  /// Fills states (BFS order) for a tree of the given depth.
  void sample(int depth, Rng& g, std::vector<Element>& states) const;
  TreeSample sample(int depth, std::uint64_t seed) const;

 private:
  const MarkovChainGibbs* chain_;
  DiscreteSampler root_;
  std::vector<DiscreteSampler> rows_;
};

/// One tree from the seed.
TreeSample sample_tree(const MarkovChainGibbs& chain, int depth, std::uint64_t seed);
/// count trees; tree t uses stream t of seed.
std::vector<TreeSample> sample_trees(const MarkovChainGibbs& chain, int depth,
                                     std::size_t count, std::uint64_t seed);

/// Normalised histogram of states over the space.
SeqFn empirical_marginal(const GroupSpace& space, std::span<const Element> states);
SeqFn empirical_marginal(const GroupSpace& space,
                         std::span<const TreeSample> samples);

/// Exact standard error of the per-tree vertex fraction of each state,
/// averaged over `trees` independent stationary trees of the given depth.
std::vector<double> tree_fraction_stderr(const MarkovChainGibbs& chain, int depth,
                                         std::size_t trees);

// Exports.

/// replicate,vertex,depth,state
void write_samples_csv(std::ostream& os, std::span<const TreeSample> samples);

}  // namespace treegibbs
