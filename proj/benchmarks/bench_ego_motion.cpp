#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "radaccum/doppler.hpp"
#include "radaccum/gicp.hpp"
#include "radaccum/synth.hpp"

namespace {

using radaccum::RigidTransform;
using radaccum::Vec3;

void BM_DopplerRansac(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> az(-1.0, 1.0), el(-0.2, 0.2), range(2.0, 60.0);
  std::normal_distribution<double> noise(0.0, 0.05);
  const Vec3 v(15.0 / 3.6, 0.1, 0.0);
  std::vector<radaccum::RadarPoint> pts(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pts[i].position = radaccum::to_cartesian({range(rng), az(rng), el(rng)});
    const Vec3 u = pts[i].position.normalized();
    const Vec3 target = i % 3 == 0 ? Vec3(3.0, 0, 0) : Vec3::Zero();  // a third moves
    pts[i].v_rr = u.dot(target - v) + noise(rng);
  }
  const radaccum::DopplerConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(radaccum::em_doppler(pts, 0, 1, 0.1, cfg));
}
BENCHMARK(BM_DopplerRansac)->Arg(100)->Arg(400)->Arg(1600)->Unit(benchmark::kMicrosecond);

struct FramePair {
  std::vector<Vec3> prev, cur;
};

// Lidar points of two consecutive straight-15kmh frames in ego coordinates.
const FramePair& street_pair() {
  static const FramePair pair = [] {
    radaccum::synth::ScenarioConfig cfg = radaccum::synth::builtin_scenario("straight-15kmh");
    cfg.duration = 0.2;
    const auto [seq, truth] = radaccum::synth::simulate(cfg);
    const RigidTransform mount = seq.lidar_mounting();
    FramePair p;
    for (const auto& pt : seq.frames[0].lidar) p.prev.push_back(mount.apply(pt.position));
    for (const auto& pt : seq.frames[1].lidar) p.cur.push_back(mount.apply(pt.position));
    return p;
  }();
  return pair;
}

void BM_GicpCloudPrepare(benchmark::State& state) {
  const auto& pair = street_pair();
  const auto cfg = radaccum::GicpConfig::Lidar();
  for (auto _ : state) {
    radaccum::GicpCloud cloud(pair.prev, cfg);
    benchmark::DoNotOptimize(cloud.size());
  }
  state.counters["points"] = static_cast<double>(pair.prev.size());
}
BENCHMARK(BM_GicpCloudPrepare)->Unit(benchmark::kMillisecond);

void BM_GicpRegister(benchmark::State& state) {
  const auto& pair = street_pair();
  const auto cfg = radaccum::GicpConfig::Lidar();
  const radaccum::GicpCloud src(pair.prev, cfg);
  const radaccum::GicpCloud dst(pair.cur, cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        radaccum::em_gicp(src, dst, 0, 1, RigidTransform::Identity(), cfg));
  }
  state.counters["points"] = static_cast<double>(src.size());
}
BENCHMARK(BM_GicpRegister)->Unit(benchmark::kMillisecond);

}  // namespace
