// Serial reference kernels against their OpenMP counterparts on the
// workloads the library actually runs: an L1 integrand over a 2-D grid, a
// grid maximum, and epigraph support over a vertex grid.

#include <benchmark/benchmark.h>

#include <cmath>

#include "metent/convex_function.hpp"
#include "metent/grid.hpp"
#include "metent/kernels.hpp"
#include "metent/metrics.hpp"

namespace {

using namespace metent;

struct Pair {
  ConvexFunction f = make_random_convex(2, 1.0, 6, 11).function;
  ConvexFunction g = make_random_convex(2, 1.0, 6, 12).function;
};

const Pair& pair() {
  static const Pair p;
  return p;
}

void BM_WeightedSum_Serial(benchmark::State& st) {
  const TensorGrid grid(Rect::unit(2), GridSpec{static_cast<std::size_t>(st.range(0)), QuadratureRule::midpoint});
  const auto& p = pair();
  for (auto _ : st) {
    const double v = kernels::serial::weighted_sum(
        grid, [&](const double* x) { return std::abs(p.f.eval_unchecked(x) - p.g.eval_unchecked(x)); });
    benchmark::DoNotOptimize(v);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(grid.size()));
}

void BM_WeightedSum_Parallel(benchmark::State& st) {
  const TensorGrid grid(Rect::unit(2), GridSpec{static_cast<std::size_t>(st.range(0)), QuadratureRule::midpoint});
  const auto& p = pair();
  for (auto _ : st) {
    const double v = kernels::parallel::weighted_sum(
        grid, [&](const double* x) { return std::abs(p.f.eval_unchecked(x) - p.g.eval_unchecked(x)); });
    benchmark::DoNotOptimize(v);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(grid.size()));
}

void BM_Max_Serial(benchmark::State& st) {
  const TensorGrid grid(Rect::unit(2), GridSpec{static_cast<std::size_t>(st.range(0)), QuadratureRule::trapezoid});
  const auto& p = pair();
  for (auto _ : st) {
    const double v = kernels::serial::max(
        grid, [&](const double* x) { return std::abs(p.f.eval_unchecked(x) - p.g.eval_unchecked(x)); });
    benchmark::DoNotOptimize(v);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(grid.size()));
}

void BM_Max_Parallel(benchmark::State& st) {
  const TensorGrid grid(Rect::unit(2), GridSpec{static_cast<std::size_t>(st.range(0)), QuadratureRule::trapezoid});
  const auto& p = pair();
  for (auto _ : st) {
    const double v = kernels::parallel::max(
        grid, [&](const double* x) { return std::abs(p.f.eval_unchecked(x) - p.g.eval_unchecked(x)); });
    benchmark::DoNotOptimize(v);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(grid.size()));
}

struct SupportInput {
  std::vector<double> points, values, dirs;
};

SupportInput support_input(std::size_t n) {
  SupportInput in;
  in.points = vertex_nodes(Rect::unit(2), n);
  const std::size_t npts = in.points.size() / 2;
  for (std::size_t j = 0; j < npts; ++j) in.values.push_back(pair().f.eval_unchecked(in.points.data() + 2 * j));
  in.dirs = sphere_directions(3, 512);
  return in;
}

void BM_Support_Serial(benchmark::State& st) {
  const auto in = support_input(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    auto v = kernels::serial::epigraph_support(in.points, in.values, 1.0, in.dirs, 2);
    benchmark::DoNotOptimize(v.data());
  }
}

void BM_Support_Parallel(benchmark::State& st) {
  const auto in = support_input(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    auto v = kernels::parallel::epigraph_support(in.points, in.values, 1.0, in.dirs, 2);
    benchmark::DoNotOptimize(v.data());
  }
}

}  // namespace

BENCHMARK(BM_WeightedSum_Serial)->Arg(256)->Arg(1024);
BENCHMARK(BM_WeightedSum_Parallel)->Arg(256)->Arg(1024);
BENCHMARK(BM_Max_Serial)->Arg(256)->Arg(1024);
BENCHMARK(BM_Max_Parallel)->Arg(256)->Arg(1024);
BENCHMARK(BM_Support_Serial)->Arg(65)->Arg(129);
BENCHMARK(BM_Support_Parallel)->Arg(65)->Arg(129);

BENCHMARK_MAIN();
