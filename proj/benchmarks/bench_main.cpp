#include <benchmark/benchmark.h>

#include "treegibbs/gibbs.hpp"
#include "treegibbs/gradient.hpp"
#include "treegibbs/potentials.hpp"
#include "treegibbs/seqspace.hpp"
#include "treegibbs/solver.hpp"

using namespace treegibbs;

static void BM_Convolve(benchmark::State& state) {
  const auto s = GroupSpace::window(state.range(0));
  const auto Q = TransferOperator::sos(s, 2.4);
  const SeqFn x = SeqFn::from_function(s, [](Element e) { return 1.0 / (1.0 + e * e); });
  for (auto _ : state) benchmark::DoNotOptimize(convolve(Q.table(), x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Convolve)->RangeMultiplier(2)->Range(16, 256)->Complexity();

static void BM_Solve(benchmark::State& state) {
  const LocalizationProblem p{2, TransferOperator::sos(GroupSpace::window(state.range(0)), 2.4),
                              {0, 5}};
  for (auto _ : state) benchmark::DoNotOptimize(solve(p));
}
BENCHMARK(BM_Solve)->Arg(30)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

static void BM_SampleTrees(benchmark::State& state) {
  const LocalizationProblem p{2, TransferOperator::sos(GroupSpace::window(60), 2.4), {0, 5}};
  const auto sol = solve(p);
  const auto chain = MarkovChainGibbs::from_boundary_law(sol, p.Q);
  const TreeSampler sampler(chain);
  Rng g(1);
  std::vector<Element> states;
  const int depth = static_cast<int>(state.range(0));
  for (auto _ : state) {
    sampler.sample(depth, g, states);
    benchmark::DoNotOptimize(states.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(tree_size(2, depth)));
}
BENCHMARK(BM_SampleTrees)->Arg(3)->Arg(8);

static void BM_SampleBranch(benchmark::State& state) {
  const auto fc =
      build_fuzzy_chain(TransferOperator::sos(GroupSpace::window(30), 2.4), 5, 2, {0, 1});
  Rng g(1);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_branch(fc, n, g));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SampleBranch)->Arg(64)->Arg(10000);
BENCHMARK_MAIN();
