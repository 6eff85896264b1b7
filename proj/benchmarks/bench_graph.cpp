#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "modmig/include_graph.hpp"

namespace {

modmig::IncludeGraph random_graph(int nodes, int out_degree) {
  std::mt19937 rng(4242);
  modmig::IncludeGraph g;
  std::vector<std::string> names;
  names.reserve(nodes);
  for (int i = 0; i < nodes; ++i) {
    names.push_back("/bench/h" + std::to_string(i) + ".h");
    g.nodes.emplace(names.back(), modmig::FileInfo{});
  }
  int line = 1;
  for (int i = 0; i < nodes; ++i)
    for (int k = 0; k < out_degree; ++k) {
      modmig::IncludeDirective d;
      const int j = static_cast<int>(rng() % nodes);
      d.spelled_path = names[j];
      d.line = line++;
      g.edges.push_back({names[i], names[j], d});
    }
  return g;
}

void BM_find_cycles(benchmark::State &state) {
  const auto g = random_graph(static_cast<int>(state.range(0)), 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(modmig::find_cycles(g));
}

void BM_transitive_includes(benchmark::State &state) {
  const auto g = random_graph(static_cast<int>(state.range(0)), 3);
  const std::string start = "/bench/h0.h";
  for (auto _ : state)
    benchmark::DoNotOptimize(modmig::transitive_includes(g, start));
}

} // namespace

BENCHMARK(BM_find_cycles)->Arg(100)->Arg(1000);
BENCHMARK(BM_transitive_includes)->Arg(100)->Arg(1000);
