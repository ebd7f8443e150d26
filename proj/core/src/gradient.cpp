#include "treegibbs/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "treegibbs/constants.hpp"
#include "treegibbs/error.hpp"

namespace treegibbs {
namespace {

std::vector<IncrementKernel> make_kernels(const TransferOperator& Q,
                                          const FuzzyOperator& fz, std::int64_t q,
                                          double tail_tolerance) {
  const GroupSpace& base = Q.space();
  const GroupSpace cyc = GroupSpace::cyclic(q);
  std::vector<IncrementKernel> out(static_cast<std::size_t>(q));
  for (std::size_t b = 0; b < out.size(); ++b) out[b].cls = static_cast<Element>(b);
  for (std::size_t k = 0; k < base.size(); ++k) {
    const Element j = base.element(k);
    const double w = Q.table()[k];
    if (w <= 0.0) continue;
    auto& ker = out[cyc.index(j)];
    ker.support.push_back(j);
    ker.weights.push_back(w);
  }
  for (auto& ker : out) {
    const double sum = std::accumulate(ker.weights.begin(), ker.weights.end(), 0.0);
    if (sum <= 0.0) continue;  // class unreachable under Q
    for (double& w : ker.weights) w /= sum;
    ker.tail_bound = fz.tail_mass / sum;
    if (ker.tail_bound > tail_tolerance) {
      std::ostringstream os;
      os << "increment kernel of class " << ker.cls << " drops up to "
         << ker.tail_bound << " of its mass outside " << base.describe();
      throw TruncationError(os.str(), ker.tail_bound);
    }
  }
  return out;
}

}  // namespace

FuzzyChain build_fuzzy_chain(const TransferOperator& Q, std::int64_t q, int d,
                             std::vector<Element> A, const FuzzyOptions& opt) {
  if (Q.space().is_cyclic())
    throw InvalidArgument("build_fuzzy_chain expects Q on a window of Z");
  FuzzyOperator fz = fuzzy_operator(Q, q, opt.tail_tolerance);
  const GroupSpace cyc = fz.op.space();
  for (Element& a : A) a = cyc.reduce(a);
  const Partition part(cyc, A);
  const int n = static_cast<int>(part.inside().size());
  if (n < 1 || n > q - 1) throw InvalidArgument("need 1 <= |A| <= q - 1");

  const double eps = deviation_norm(fz.op, d).value;
  const double eta = eta_dn(d, n);
  if (eps > eta) {
    std::ostringstream os;
    os << "fuzzy operator deviation " << eps << " exceeds eta(" << d << "," << n
       << ") = " << eta;
    throw ThresholdExceeded(os.str(), eps, eta);
  }

  LocalizationProblem problem{d, fz.op, A, opt.tol_inner, opt.tol_outer,
                              opt.max_iter, 1e-12};
  BoundaryLawSolution sol = solve(problem);
  MarkovChainGibbs chain = MarkovChainGibbs::from_boundary_law(sol, fz.op);
  std::vector<IncrementKernel> kernels = make_kernels(Q, fz, q, opt.tail_tolerance);

  std::vector<DiscreteSampler> ksamp(kernels.size());
  for (std::size_t b = 0; b < kernels.size(); ++b)
    if (!kernels[b].weights.empty()) ksamp[b] = DiscreteSampler(kernels[b].weights);
  DiscreteSampler root(chain.pi().values());
  std::vector<DiscreteSampler> rows(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto r = chain.row(i);
    if (std::accumulate(r.begin(), r.end(), 0.0) > 0.0) rows[i] = DiscreteSampler(r);
  }
  return FuzzyChain{q,
                    d,
                    Q,
                    std::move(fz),
                    std::move(sol),
                    std::move(chain),
                    eps,
                    eta,
                    std::move(kernels),
                    std::move(ksamp),
                    std::move(root),
                    std::move(rows)};
}

const IncrementKernel& increment_kernel(const FuzzyChain& fc, Element cls) {
  const GroupSpace cyc = GroupSpace::cyclic(fc.q);
  return fc.kernels[cyc.index(cls)];
}

double kernel_probability(const FuzzyChain& fc, Element c) {
  const IncrementKernel& ker = increment_kernel(fc, c);
  const auto it = std::find(ker.support.begin(), ker.support.end(), c);
  if (it == ker.support.end()) return 0.0;
  return ker.weights[static_cast<std::size_t>(it - ker.support.begin())];
}

PathSample sample_branch(const FuzzyChain& fc, int n, Rng& g) {
  if (n < 1) throw InvalidArgument("branch length must be >= 1");
  const std::int64_t q = fc.q;
  PathSample s;
  s.fuzzy_states.resize(static_cast<std::size_t>(n) + 1);
  s.increments.resize(static_cast<std::size_t>(n));
  s.W.assign(static_cast<std::size_t>(n) + 1, 0);
  // Z_q indices coincide with representatives 0..q-1.
  std::size_t state = fc.root_sampler(g);
  s.fuzzy_states[0] = static_cast<Element>(state);
  for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
    const std::size_t next = fc.row_samplers[state](g);
    const auto cls = static_cast<std::size_t>(
        ((static_cast<std::int64_t>(next) - static_cast<std::int64_t>(state)) % q + q) % q);
    const Element inc = fc.kernels[cls].support[fc.kernel_samplers[cls](g)];
    s.fuzzy_states[k + 1] = static_cast<Element>(next);
    s.increments[k] = inc;
    s.W[k + 1] = s.W[k] + inc;
    state = next;
  }
  return s;
}

PathSample sample_branch(const FuzzyChain& fc, int n, std::uint64_t seed) {
  Rng g(stream_seed(seed, 0));
  return sample_branch(fc, n, g);
}

std::vector<PathSample> sample_branches(const FuzzyChain& fc, int n,
                                        std::size_t count, std::uint64_t seed) {
  std::vector<PathSample> out;
  out.reserve(count);
  for (std::size_t b = 0; b < count; ++b) {
    Rng g(stream_seed(seed, b));
    out.push_back(sample_branch(fc, n, g));
  }
  return out;
}

std::size_t congruence_violations(const FuzzyChain& fc, const PathSample& s) {
  const GroupSpace cyc = GroupSpace::cyclic(fc.q);
  std::size_t bad = 0;
  for (std::size_t k = 0; k < s.increments.size(); ++k)
    if (cyc.reduce(s.increments[k]) != cyc.sub(s.fuzzy_states[k + 1], s.fuzzy_states[k]))
      ++bad;
  if (cyc.reduce(s.W.back()) != cyc.sub(s.fuzzy_states.back(), s.fuzzy_states.front()))
    ++bad;
  return bad;
}

std::vector<double> first_increment_law(const FuzzyChain& fc) {
  const GroupSpace& base = fc.base_Q.space();
  const GroupSpace cyc = GroupSpace::cyclic(fc.q);
  std::vector<double> cls_mass(static_cast<std::size_t>(fc.q), 0.0);
  for (std::size_t a = 0; a < fc.chain.size(); ++a)
    for (std::size_t b = 0; b < fc.chain.size(); ++b)
      cls_mass[cyc.index(static_cast<Element>(b) - static_cast<Element>(a))] +=
          fc.chain.pi()[a] * fc.chain.P(a, b);
  std::vector<double> law(base.size(), 0.0);
  for (const auto& ker : fc.kernels)
    for (std::size_t k = 0; k < ker.support.size(); ++k)
      law[base.index(ker.support[k])] +=
          cls_mass[static_cast<std::size_t>(ker.cls)] * ker.weights[k];
  return law;
}

std::vector<DelocalizationPoint> delocalization_stat(const FuzzyChain& fc,
                                                     std::span<const int> n_grid,
                                                     Element k, std::size_t samples,
                                                     std::uint64_t seed) {
  if (samples == 0) throw InvalidArgument("delocalization_stat needs samples");
  std::vector<DelocalizationPoint> out;
  for (int n : n_grid) {
    // Independent sample sets per n: sub-stream n of the master seed.
    const std::uint64_t seed_n = stream_seed(seed, 0x100000000ULL + static_cast<std::uint64_t>(n));
    std::size_t hits = 0;
    for (std::size_t s = 0; s < samples; ++s) {
      Rng g(stream_seed(seed_n, s));
      if (sample_branch(fc, n, g).W.back() == k) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    out.push_back({n, {p, std::sqrt(p * (1 - p) / static_cast<double>(samples))}});
  }
  return out;
}

double pair_limit_formula(const FuzzyChain& fc, Element abar, Element c) {
  const GroupSpace cyc = GroupSpace::cyclic(fc.q);
  const double e = fc.d / (fc.d + 1.0);
  const auto& pi = fc.chain.pi();
  const std::size_t a = cyc.index(abar);
  double den = 0.0;
  for (std::size_t b = 0; b < cyc.size(); ++b)
    den += fc.fuzzy.class_sums[cyc.index(static_cast<Element>(a) - static_cast<Element>(b))] *
           std::pow(pi[b], e);
  if (!(den > 0.0)) return 0.0;
  const double Qc = fc.base_Q.table().at(c);
  return pi[a] * std::pow(pi[cyc.index(abar + c)], e) * Qc / den;
}

Estimate pair_empirical(std::span<const PathSample> samples, std::int64_t q,
                        Element abar, Element c) {
  if (samples.empty()) throw InvalidArgument("pair_empirical needs samples");
  const GroupSpace cyc = GroupSpace::cyclic(q);
  const Element a = cyc.reduce(abar);
  std::vector<double> freq;
  freq.reserve(samples.size());
  for (const auto& s : samples) {
    std::size_t hits = 0;
    for (std::size_t k = 0; k < s.increments.size(); ++k)
      if (s.fuzzy_states[k] == a && s.increments[k] == c) ++hits;
    freq.push_back(static_cast<double>(hits) / static_cast<double>(s.increments.size()));
  }
  const double B = static_cast<double>(freq.size());
  const double mean = std::accumulate(freq.begin(), freq.end(), 0.0) / B;
  double ss = 0.0;
  for (double f : freq) ss += (f - mean) * (f - mean);
  const double sd = freq.size() > 1 ? std::sqrt(ss / (B - 1)) : 0.0;
  return {mean, sd / std::sqrt(B)};
}

void write_path_csv(std::ostream& os, const PathSample& s) {
  os << "step,fuzzy,increment,W\n";
  for (std::size_t k = 0; k < s.fuzzy_states.size(); ++k) {
    os << k << ',' << s.fuzzy_states[k] << ',';
    if (k > 0) os << s.increments[k - 1];
    os << ',' << s.W[k] << '\n';
  }
}

}  // namespace treegibbs
