#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "radaccum/metrics.hpp"
#include "radaccum/quaternion_average.hpp"
#include "radaccum/spatial_index.hpp"

namespace {

using radaccum::Vec3;

std::vector<Vec3> cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::vector<Vec3> pts(n);
  for (Vec3& p : pts) p = Vec3(u(rng), u(rng), 0.05 * u(rng));
  return pts;
}

void BM_KdTreeBuild(benchmark::State& state) {
  const auto pts = cloud(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    radaccum::SpatialIndex index(pts);
    benchmark::DoNotOptimize(index.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KdTreeBuild)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);

void BM_KdTreeNearest(benchmark::State& state) {
  const radaccum::SpatialIndex index(cloud(static_cast<std::size_t>(state.range(0)), 2));
  const auto queries = cloud(1024, 3);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.nearest(queries[i++ & 1023]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_KdTreeNearest)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);

void BM_KdTreeKNearest(benchmark::State& state) {
  const radaccum::SpatialIndex index(cloud(1 << 14, 4));
  const auto queries = cloud(1024, 5);
  const auto k = static_cast<std::size_t>(state.range(0));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.k_nearest(queries[i++ & 1023], k));
  }
}
BENCHMARK(BM_KdTreeKNearest)->Arg(1)->Arg(5)->Arg(20);

// Roughly the size of one radar frame against one lidar frame.
void BM_ChamferSymmetric(benchmark::State& state) {
  const auto a = cloud(static_cast<std::size_t>(state.range(0)), 6);
  const auto b = cloud(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(radaccum::chamfer_symmetric(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ChamferSymmetric)->RangeMultiplier(4)->Range(256, 1 << 14)->Complexity();

void BM_AverageQuaternions(benchmark::State& state) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 0.1);
  std::vector<radaccum::Quat> qs;
  for (int i = 0; i < state.range(0); ++i) {
    qs.emplace_back(1.0, n(rng), n(rng), n(rng));
    qs.back().normalize();
  }
  for (auto _ : state) benchmark::DoNotOptimize(radaccum::average_quaternions(qs));
}
BENCHMARK(BM_AverageQuaternions)->Arg(6)->Arg(64);

}  // namespace
