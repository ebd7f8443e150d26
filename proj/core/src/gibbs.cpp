#include "treegibbs/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>

#include "treegibbs/constants.hpp"
#include "treegibbs/error.hpp"

namespace treegibbs {
namespace {

// Q(e_i - e_j) by space indices; zero where the difference leaves a window.
std::vector<double> kernel_matrix(const TransferOperator& Q) {
  const GroupSpace& s = Q.space();
  const std::size_t N = s.size();
  std::vector<double> m(N * N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      m[i * N + j] = Q.table().at(s.sub(s.element(i), s.element(j)));
  return m;
}

BoundCheck le(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, measured <= bound};
}

BoundCheck lt(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, measured < bound};
}

}  // namespace

MarkovChainGibbs::MarkovChainGibbs(int d, TransferOperator Q, SeqFn xbar,
                                   SeqFn pi, std::vector<double> P,
                                   std::vector<Element> A, double residual,
                                   double epsilon)
    : d_(d),
      Q_(std::move(Q)),
      xbar_(std::move(xbar)),
      pi_(std::move(pi)),
      P_(std::move(P)),
      A_(std::move(A)),
      residual_(residual),
      epsilon_(epsilon) {}

MarkovChainGibbs MarkovChainGibbs::from_boundary_law(const BoundaryLawSolution& sol,
                                                     const TransferOperator& Q) {
  if (!(sol.xbar.space() == Q.space()))
    throw InvalidArgument("from_boundary_law: solution and Q live on different spaces");
  if (!sol.xbar.all_nonnegative())
    throw InvalidArgument("from_boundary_law: xbar must be nonnegative");
  const int d = sol.d;
  const std::size_t N = Q.space().size();
  const auto x = sol.xbar.values();

  std::vector<double> pi(N);
  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i) total += (pi[i] = std::pow(x[i], d + 1));
  for (double& v : pi) v /= total;

  const std::vector<double> Qm = kernel_matrix(Q);
  std::vector<double> P(N * N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    if (!(x[i] > 0.0)) continue;
    for (std::size_t j = 0; j < N; ++j)
      P[i * N + j] = std::pow(x[j], d) * Qm[i * N + j] / x[i];
  }
  return MarkovChainGibbs(d, Q, sol.xbar, SeqFn(Q.space(), std::move(pi)),
                          std::move(P), sol.A, sol.residual, sol.epsilon);
}

std::vector<double> MarkovChainGibbs::delta() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = P(i, i);
  return out;
}

double row_sum_defect(const MarkovChainGibbs& chain) {
  double worst = 0.0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (!(chain.xbar()[i] > 0.0)) continue;
    const auto r = chain.row(i);
    worst = std::max(worst, std::abs(std::accumulate(r.begin(), r.end(), 0.0) - 1.0));
  }
  return worst;
}

double row_sum_tolerance(const MarkovChainGibbs& chain) {
  double m = kInfinity;
  for (double v : chain.xbar().values())
    if (v > 0.0) m = std::min(m, v);
  return 10.0 * chain.solver_residual() / m;
}

double reversibility_defect(const MarkovChainGibbs& chain) {
  double worst = 0.0;
  const auto& pi = chain.pi();
  for (std::size_t i = 0; i < chain.size(); ++i)
    for (std::size_t j = i + 1; j < chain.size(); ++j)
      worst = std::max(worst, std::abs(pi[i] * chain.P(i, j) - pi[j] * chain.P(j, i)));
  return worst;
}

std::vector<double> transition_from_marginal(const MarkovChainGibbs& chain) {
  const std::size_t N = chain.size();
  const double e = chain.d() / (chain.d() + 1.0);
  std::vector<double> w(N);
  for (std::size_t j = 0; j < N; ++j) w[j] = std::pow(chain.pi()[j], e);
  const std::vector<double> Qm = kernel_matrix(chain.Q());
  std::vector<double> out(N * N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    double den = 0.0;
    for (std::size_t j = 0; j < N; ++j) den += Qm[i * N + j] * w[j];
    if (!(den > 0.0)) continue;
    for (std::size_t j = 0; j < N; ++j) out[i * N + j] = w[j] * Qm[i * N + j] / den;
  }
  return out;
}

double transition_formula_defect(const MarkovChainGibbs& chain) {
  const std::vector<double> alt = transition_from_marginal(chain);
  const std::size_t N = chain.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    if (!(chain.pi()[i] > 0.0)) continue;
    for (std::size_t j = 0; j < N; ++j)
      worst = std::max(worst, std::abs(alt[i * N + j] - chain.P(i, j)));
  }
  return worst;
}

bool lazy_on_A(const MarkovChainGibbs& chain) {
  for (Element a : chain.A()) {
    const std::size_t i = chain.space().index(a);
    const auto r = chain.row(i);
    const auto top = std::max_element(r.begin(), r.end()) - r.begin();
    if (static_cast<std::size_t>(top) != i) return false;
  }
  return true;
}

bool TheoremReport::all_pass() const {
  return std::all_of(bounds.begin(), bounds.end(),
                     [](const BoundCheck& b) { return b.pass; });
}

TheoremReport verify_theorem_bounds(const MarkovChainGibbs& chain,
                                    std::span<const Element> A, double epsilon) {
  const Partition part(chain.space(), A);
  const int d = chain.d();
  const double dd = d;
  const int n = static_cast<int>(part.inside().size());
  const ModelConstants k = theorem_constants(d, n);
  const double eps = epsilon;
  const auto pi = chain.pi().values();
  const std::vector<double> delta = chain.delta();
  const std::size_t N = chain.size();

  const std::vector<double> pi_out = restrict_to(pi, part.outside());
  const std::vector<double> pi_in = restrict_to(pi, part.inside());
  const std::vector<double> delta_out = restrict_to(delta, part.outside());
  const std::vector<double> delta_in = restrict_to(delta, part.inside());
  const double mass_out = std::accumulate(pi_out.begin(), pi_out.end(), 0.0);
  const double min_pi_A = *std::min_element(pi_in.begin(), pi_in.end());
  const double max_pi_A = *std::max_element(pi_in.begin(), pi_in.end());
  const double min_delta_A = *std::min_element(delta_in.begin(), delta_in.end());
  const double delta_norm = lp_norm(delta_out, (dd + 1) / (dd - 1));

  TheoremReport rep;
  rep.epsilon = eps;
  rep.n = n;
  auto& b = rep.bounds;
  b.push_back(lt("lazy mass: ||pi|A^c||_1 < theta min_A pi", mass_out, k.theta * min_pi_A));
  b.push_back(lt("diagonal: ||Delta|A^c|| < rho^(d-1)", delta_norm, std::pow(k.rho, dd - 1)));
  b.push_back(lt("diagonal: rho^(d-1) < 1/d", std::pow(k.rho, dd - 1), 1.0 / dd));
  b.push_back({"diagonal: 1/d < Delta|A", min_delta_A, 1.0 / dd, 1.0 / dd < min_delta_A});
  b.push_back(le("Delta off A: ||Delta|A^c|| <= c1 eps^(d-1)", delta_norm,
                 k.c1 * std::pow(eps, dd - 1)));
  {
    // At eps = 0 the chain is exactly lazy (Delta|A = 1), so only >= can hold.
    const double bound = 1.0 - k.c2 * eps;
    const bool pass = eps > 0 ? min_delta_A > bound : min_delta_A >= bound;
    b.push_back({"Delta on A: Delta|A > 1 - c2 eps", min_delta_A, bound, pass});
  }
  b.push_back(le("mass off A: ||pi|A^c||_1 <= c3 eps^(d+1)", mass_out,
                 k.c3 * std::pow(eps, dd + 1)));
  {
    const double lower = (1.0 - k.c5 * eps) / n;
    b.push_back({"pi on A, lower: (1 - c5 eps)/n <= pi|A", min_pi_A, lower, lower <= min_pi_A});
    // The upper side says nothing once c4 eps >= 1.
    const double upper = k.c4 * eps < 1.0 ? 1.0 / ((1.0 - k.c4 * eps) * n) : kInfinity;
    b.push_back(le("pi on A, upper: pi|A <= (1 - c4 eps)^(-1)/n", max_pi_A, upper));
  }

  const std::vector<double> Qm = kernel_matrix(chain.Q());
  {
    const double floor5 = 1.0 - k.c6 * eps;
    double worst = kInfinity;
    for (std::size_t i : part.outside()) {
      double s = 0.0;
      for (std::size_t j : part.inside()) s += Qm[i * N + j];
      if (s > 0.0) worst = std::min(worst, pi[i] * n / std::pow(s, dd + 1));
    }
    if (std::isinf(worst)) worst = std::max(floor5, 0.0);
    b.push_back({"pi off A: pi(i) >= (1 - c6 eps) (sum_A Q(i-j))^(d+1)/n", worst, floor5,
                 worst >= floor5});
  }
  {
    const double e = dd / (dd + 1);
    std::vector<double> w(N);
    for (std::size_t j = 0; j < N; ++j) w[j] = std::pow(pi[j], e);
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double den = 0.0;
      for (std::size_t j = 0; j < N; ++j) den += Qm[i * N + j] * w[j];
      double out = 0.0;
      for (std::size_t j : part.outside()) out += chain.P(i, j);
      worst = std::max(worst, out * den);
    }
    const double bound =
        k.c7 * lp_norm(chain.Q().table(), dd + 1) * std::pow(eps, dd);
    b.push_back(le("jump: P(i,A^c) (Q*pi^(d/(d+1)))(i) <= c7 ||Q||_(d+1) eps^d",
                   worst, bound));
  }
  return rep;
}

// ---- finite volumes -------------------------------------------------------

Subtree Subtree::star(int d) {
  if (d < 2) throw InvalidArgument("tree order d must be >= 2");
  Subtree t;
  t.vertices = d + 2;
  t.boundary.assign(static_cast<std::size_t>(t.vertices), 1);
  t.boundary[0] = 0;
  for (int y = 1; y <= d + 1; ++y) t.edges.emplace_back(0, y);
  return t;
}

Subtree Subtree::edge(int d) {
  if (d < 2) throw InvalidArgument("tree order d must be >= 2");
  Subtree t;
  t.vertices = 2 + 2 * d;
  t.boundary.assign(static_cast<std::size_t>(t.vertices), 1);
  t.boundary[0] = t.boundary[1] = 0;
  t.edges.emplace_back(0, 1);
  int next = 2;
  for (int x = 0; x < 2; ++x)
    for (int k = 0; k < d; ++k) t.edges.emplace_back(x, next++);
  return t;
}

void Subtree::validate(int d) const {
  if (vertices < 2 || static_cast<int>(boundary.size()) != vertices)
    throw InvalidArgument("subtree: vertex count and boundary flags disagree");
  if (static_cast<int>(edges.size()) != vertices - 1)
    throw InvalidArgument("subtree: a tree on V vertices has V-1 edges");
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(vertices));
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= vertices || b >= vertices || a == b)
      throw InvalidArgument("subtree: bad edge");
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  // Connectivity.
  std::vector<char> seen(static_cast<std::size_t>(vertices), 0);
  std::queue<int> todo;
  todo.push(0);
  seen[0] = 1;
  int count = 0;
  while (!todo.empty()) {
    const int v = todo.front();
    todo.pop();
    ++count;
    for (int w : adj[v])
      if (!seen[w]) { seen[w] = 1; todo.push(w); }
  }
  if (count != vertices) throw InvalidArgument("subtree is not connected");
  bool any_interior = false;
  for (int v = 0; v < vertices; ++v) {
    if (boundary[v]) {
      if (adj[v].size() != 1 || boundary[adj[v][0]])
        throw InvalidArgument("subtree: boundary vertices must hang off the interior");
    } else {
      any_interior = true;
      if (static_cast<int>(adj[v].size()) != d + 1)
        throw InvalidArgument("subtree: interior vertices need d+1 neighbours");
    }
  }
  if (!any_interior) throw InvalidArgument("subtree has no interior vertex");
}

FiniteVolumeMeasure::FiniteVolumeMeasure(const BoundaryLawSolution& sol,
                                         const TransferOperator& Q, Subtree tree)
    : tree_(std::move(tree)), space_(Q.space()), d_(sol.d) {
  tree_.validate(d_);
  if (!(sol.xbar.space() == Q.space()))
    throw InvalidArgument("finite volume: solution and Q live on different spaces");
  const std::size_t N = space_.size();
  const double configs = std::pow(static_cast<double>(N), tree_.vertices);
  if (configs > kMaxConfigurations) {
    std::ostringstream os;
    os << "finite volume too large for exhaustive normalisation: " << N << "^"
       << tree_.vertices << " configurations";
    throw InvalidArgument(os.str());
  }
  Q_ = kernel_matrix(Q);
  u_.resize(N);
  for (std::size_t i = 0; i < N; ++i) u_[i] = std::pow(sol.xbar[i], d_);

  const auto V = static_cast<std::size_t>(tree_.vertices);
  vertex_.assign(V, std::vector<double>(N, 0.0));
  pair_.assign(tree_.edges.size(), std::vector<double>(N * N, 0.0));
  std::vector<std::size_t> idx(V, 0);
  while (true) {
    const double w = weight(idx);
    if (w > 0.0) {
      Z_ += w;
      for (std::size_t v = 0; v < V; ++v) vertex_[v][idx[v]] += w;
      for (std::size_t e = 0; e < tree_.edges.size(); ++e)
        pair_[e][idx[tree_.edges[e].first] * N + idx[tree_.edges[e].second]] += w;
    }
    std::size_t v = 0;
    while (v < V && ++idx[v] == N) idx[v++] = 0;
    if (v == V) break;
  }
  if (!(Z_ > 0.0)) throw InvalidArgument("finite volume has zero total weight");
  for (auto& m : vertex_)
    for (double& p : m) p /= Z_;
  for (auto& m : pair_)
    for (double& p : m) p /= Z_;
}

double FiniteVolumeMeasure::weight(std::span<const std::size_t> idx) const {
  const std::size_t N = space_.size();
  double w = 1.0;
  for (int v = 0; v < tree_.vertices; ++v)
    if (tree_.boundary[v]) w *= u_[idx[v]];
  for (auto [a, b] : tree_.edges) w *= Q_[idx[a] * N + idx[b]];
  return w;
}

double FiniteVolumeMeasure::log_weight(std::span<const Element> omega) const {
  if (static_cast<int>(omega.size()) != tree_.vertices)
    throw InvalidArgument("configuration must list one state per vertex");
  const std::size_t N = space_.size();
  std::vector<std::size_t> idx(omega.size());
  for (std::size_t v = 0; v < omega.size(); ++v) idx[v] = space_.index(omega[v]);
  double w = 0.0;
  for (int v = 0; v < tree_.vertices; ++v)
    if (tree_.boundary[v]) w += std::log(u_[idx[v]]);
  for (auto [a, b] : tree_.edges) w += std::log(Q_[idx[a] * N + idx[b]]);
  return w;
}

double FiniteVolumeMeasure::probability(std::span<const Element> omega) const {
  if (static_cast<int>(omega.size()) != tree_.vertices)
    throw InvalidArgument("configuration must list one state per vertex");
  std::vector<std::size_t> idx(omega.size());
  for (std::size_t v = 0; v < omega.size(); ++v) idx[v] = space_.index(omega[v]);
  return weight(idx) / Z_;
}

double finite_marginal(const BoundaryLawSolution& sol, const TransferOperator& Q,
                       const Subtree& tree, std::span<const Element> omega) {
  return FiniteVolumeMeasure(sol, Q, tree).probability(omega);
}

DlrReport dlr_oracle_check(const MarkovChainGibbs& chain,
                           const BoundaryLawSolution& sol,
                           std::size_t max_exhaustive, std::size_t samples,
                           std::uint64_t seed) {
  const std::size_t N = chain.size();
  const int d = chain.d();
  const auto nb = static_cast<std::size_t>(d + 1);
  const std::vector<double> Qm = kernel_matrix(chain.Q());
  const auto pi = chain.pi().values();

  const double total = std::pow(static_cast<double>(N), static_cast<double>(nb));
  DlrReport rep;
  rep.exhaustive = total <= static_cast<double>(max_exhaustive);

  // The star measure gives a second, independent route to the conditional law.
  const bool use_finite = std::pow(static_cast<double>(N), static_cast<double>(nb + 1)) <=
                          FiniteVolumeMeasure::kMaxConfigurations;
  std::optional<FiniteVolumeMeasure> star;
  if (use_finite) star.emplace(sol, chain.Q(), Subtree::star(d));

  // Products of small weights underflow; all three laws are normalised in
  // log space.
  auto normalise_log = [](std::vector<double>& lw) {
    double top = -kInfinity;
    for (double v : lw) top = std::max(top, v);
    if (!std::isfinite(top)) return false;
    double z = 0.0;
    for (double& v : lw) z += (v = std::exp(v - top));
    for (double& v : lw) v /= z;
    return true;
  };
  std::vector<double> spec(N), mc(N), fin(N);
  std::vector<std::size_t> omega(nb, 0);
  std::vector<Element> full(nb + 1);
  auto compare = [&]() {
    for (std::size_t i = 0; i < N; ++i) {
      double s = 0.0, c = std::log(pi[i]);
      for (std::size_t y = 0; y < nb; ++y) {
        s += std::log(Qm[i * N + omega[y]]);
        c += std::log(chain.P(i, omega[y]));
      }
      spec[i] = s;
      mc[i] = c;
      if (star) {
        full[0] = chain.space().element(i);
        for (std::size_t y = 0; y < nb; ++y) full[y + 1] = chain.space().element(omega[y]);
        fin[i] = star->log_weight(full);
      }
    }
    const bool spec_ok = normalise_log(spec);
    const bool mc_ok = normalise_log(mc);
    const bool fin_ok = star && normalise_log(fin);
    // Boundaries of zero measure carry no DLR constraint.
    if (!mc_ok) {
      ++rep.skipped;
      if (fin_ok) rep.finite_violation = std::max(rep.finite_violation, 1.0);
      return;
    }
    ++rep.configurations;
    if (!spec_ok || (star && !fin_ok)) {
      rep.chain_violation = std::max(rep.chain_violation, 1.0);
      return;
    }
    for (std::size_t i = 0; i < N; ++i) {
      rep.chain_violation = std::max(rep.chain_violation, std::abs(spec[i] - mc[i]));
      if (star) rep.finite_violation = std::max(rep.finite_violation, std::abs(spec[i] - fin[i]));
    }
  };

  if (rep.exhaustive) {
    while (true) {
      compare();
      std::size_t y = 0;
      while (y < nb && ++omega[y] == N) omega[y++] = 0;
      if (y == nb) break;
    }
  } else {
    Rng g(stream_seed(seed, 0));
    for (std::size_t s = 0; s < samples; ++s) {
      for (auto& o : omega) o = static_cast<std::size_t>(g() % N);
      compare();
    }
  }
  rep.max_violation = std::max(rep.chain_violation, rep.finite_violation);
  return rep;
}

// ---- sampling ---------------------------------------------------------------

std::size_t tree_size(int d, int depth) {
  if (d < 2 || depth < 0) throw InvalidArgument("tree_size needs d >= 2, depth >= 0");
  std::size_t total = 1, level = 1;
  for (int k = 1; k <= depth; ++k) {
    level *= static_cast<std::size_t>(k == 1 ? d + 1 : d);
    total += level;
  }
  return total;
}

void tree_shape(int d, int depth, std::vector<int>& level, std::vector<int>& parent) {
  const std::size_t V = tree_size(d, depth);
  level.assign(V, 0);
  parent.assign(V, -1);
  std::size_t next = 1;
  for (std::size_t v = 0; v < V && next < V; ++v) {
    const int kids = v == 0 ? d + 1 : d;
    for (int c = 0; c < kids; ++c, ++next) {
      parent[next] = static_cast<int>(v);
      level[next] = level[v] + 1;
    }
  }
}

TreeSampler::TreeSampler(const MarkovChainGibbs& chain)
    : chain_(&chain), root_(chain.pi().values()) {
  rows_.resize(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto r = chain.row(i);
    if (std::accumulate(r.begin(), r.end(), 0.0) > 0.0) rows_[i] = DiscreteSampler(r);
  }
}

void TreeSampler::sample(int depth, Rng& g, std::vector<Element>& states) const {
  const int d = chain_->d();
  const std::size_t V = tree_size(d, depth);
  std::vector<std::size_t> idx(V);
  idx[0] = root_(g);
  std::size_t next = 1;
  for (std::size_t v = 0; v < V && next < V; ++v) {
    const int kids = v == 0 ? d + 1 : d;
    for (int c = 0; c < kids; ++c, ++next) idx[next] = rows_[idx[v]](g);
  }
  states.resize(V);
  for (std::size_t v = 0; v < V; ++v) states[v] = chain_->space().element(idx[v]);
}

TreeSample TreeSampler::sample(int depth, std::uint64_t seed) const {
  TreeSample t;
  t.d = chain_->d();
  t.depth = depth;
  tree_shape(t.d, depth, t.level, t.parent);
  Rng g(seed);
  sample(depth, g, t.states);
  return t;
}

TreeSample sample_tree(const MarkovChainGibbs& chain, int depth, std::uint64_t seed) {
  return TreeSampler(chain).sample(depth, stream_seed(seed, 0));
}

std::vector<TreeSample> sample_trees(const MarkovChainGibbs& chain, int depth,
                                     std::size_t count, std::uint64_t seed) {
  const TreeSampler sampler(chain);
  std::vector<TreeSample> out;
  out.reserve(count);
  for (std::size_t t = 0; t < count; ++t)
    out.push_back(sampler.sample(depth, stream_seed(seed, t)));
  return out;
}

SeqFn empirical_marginal(const GroupSpace& space, std::span<const Element> states) {
  if (states.empty()) throw InvalidArgument("empirical_marginal needs samples");
  std::vector<double> h(space.size(), 0.0);
  for (Element e : states) h[space.index(e)] += 1.0;
  for (double& v : h) v /= static_cast<double>(states.size());
  return SeqFn(space, std::move(h));
}

SeqFn empirical_marginal(const GroupSpace& space, std::span<const TreeSample> samples) {
  std::vector<Element> all;
  for (const auto& t : samples) all.insert(all.end(), t.states.begin(), t.states.end());
  return empirical_marginal(space, all);
}

std::vector<double> tree_fraction_stderr(const MarkovChainGibbs& chain, int depth,
                                         std::size_t trees) {
  const int d = chain.d();
  std::vector<int> level, parent;
  tree_shape(d, depth, level, parent);
  const std::size_t V = level.size();
  // Ordered vertex pairs by tree distance.
  std::vector<std::vector<int>> adj(V);
  for (std::size_t v = 1; v < V; ++v) {
    adj[v].push_back(parent[v]);
    adj[static_cast<std::size_t>(parent[v])].push_back(static_cast<int>(v));
  }
  std::vector<double> pairs(2 * static_cast<std::size_t>(depth) + 1, 0.0);
  std::vector<int> dist(V);
  for (std::size_t s = 0; s < V; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::queue<std::size_t> todo;
    todo.push(s);
    dist[s] = 0;
    while (!todo.empty()) {
      const std::size_t v = todo.front();
      todo.pop();
      pairs[static_cast<std::size_t>(dist[v])] += 1.0;
      for (int w : adj[v])
        if (dist[w] < 0) { dist[w] = dist[v] + 1; todo.push(static_cast<std::size_t>(w)); }
    }
  }
  // Diagonals of P^k.
  const std::size_t N = chain.size();
  std::vector<double> Pk(N * N, 0.0), tmp(N * N);
  for (std::size_t i = 0; i < N; ++i) Pk[i * N + i] = 1.0;
  const auto& pi = chain.pi();
  std::vector<double> var(N, 0.0);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    for (std::size_t i = 0; i < N; ++i)
      var[i] += pairs[k] * (pi[i] * Pk[i * N + i] - pi[i] * pi[i]);
    std::fill(tmp.begin(), tmp.end(), 0.0);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t m = 0; m < N; ++m) {
        const double a = Pk[i * N + m];
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < N; ++j) tmp[i * N + j] += a * chain.P(m, j);
      }
    Pk.swap(tmp);
  }
  std::vector<double> se(N);
  const double VV = static_cast<double>(V) * static_cast<double>(V);
  for (std::size_t i = 0; i < N; ++i)
    se[i] = std::sqrt(std::max(var[i], 0.0) / VV / static_cast<double>(trees));
  return se;
}

void write_samples_csv(std::ostream& os, std::span<const TreeSample> samples) {
  os << "replicate,vertex,depth,state\n";
  for (std::size_t r = 0; r < samples.size(); ++r) {
    const auto& t = samples[r];
    for (std::size_t v = 0; v < t.states.size(); ++v)
      os << r << ',' << v << ',' << t.level[v] << ',' << t.states[v] << '\n';
  }
}

}  // namespace treegibbs
