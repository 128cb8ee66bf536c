#include <benchmark/benchmark.h>

#include "treeprob/experiments.hpp"
#include "treeprob/lansit.hpp"

namespace treeprob {
namespace {

template <Scalar T>
BasicTree<T> bench_tree(std::size_t depth) {
  return generate_complete_tree<T>(2, depth, 17);
}

template <Scalar T>
void BM_NodeProbabilities(benchmark::State& state) {
  const auto tree = bench_tree<T>(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(node_probabilities(tree));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tree.size()));
}

template <Scalar T>
void BM_LansitCheck(benchmark::State& state) {
  const auto tree = bench_tree<T>(static_cast<std::size_t>(state.range(0)));
  const auto f = random_functional(tree, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lansit_check(tree, f));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tree.size()));
}

template <Scalar T>
void BM_EntropyRate(benchmark::State& state) {
  const auto tree = bench_tree<T>(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(entropy_rate(tree));
  }
}

void BM_Matcher(benchmark::State& state) {
  const ProductSpec<Rational> spec(
      FiniteDistribution<Rational>({{Label{"0"}, Rational(2, 3)}, {Label{"1"}, Rational(1, 3)}}));
  for (auto _ : state) {
    benchmark::DoNotOptimize(grow_matcher_tree(spec, static_cast<std::size_t>(state.range(0))));
  }
}

BENCHMARK(BM_NodeProbabilities<double>)->DenseRange(6, 12, 3);
BENCHMARK(BM_NodeProbabilities<Rational>)->DenseRange(6, 12, 3);
BENCHMARK(BM_LansitCheck<double>)->DenseRange(6, 12, 3);
BENCHMARK(BM_LansitCheck<Rational>)->DenseRange(6, 12, 3);
BENCHMARK(BM_EntropyRate<double>)->DenseRange(6, 12, 3);
BENCHMARK(BM_EntropyRate<Rational>)->DenseRange(6, 12, 3);
BENCHMARK(BM_Matcher)->RangeMultiplier(4)->Range(16, 4096);

}  // namespace
}  // namespace treeprob

BENCHMARK_MAIN();
