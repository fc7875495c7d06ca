#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "radaccum/error.hpp"
#include "radaccum/io.hpp"
#include "radaccum/synth.hpp"
#include "test_support.hpp"

namespace radaccum {
namespace {

namespace fs = std::filesystem;

synth::ScenarioConfig noise_free(std::string_view name) {
  synth::ScenarioConfig cfg = synth::builtin_scenario(name);
  cfg.noise = {};
  return cfg;
}

std::string slurp(const fs::path& p) { return read_text_file(p); }

// World-frame velocity of the radar sensor, from the trajectory definition.
Vec3 sensor_velocity_world(const synth::ScenarioConfig& cfg, const RigidTransform& ego_pose) {
  if (const auto* turn = std::get_if<synth::ConstantTurn>(&cfg.ego)) {
    const Vec3 lever = cfg.radar_mounting.translation();
    const Vec3 body = Vec3(turn->speed, 0, 0) + Vec3(0, 0, turn->yaw_rate).cross(lever);
    return ego_pose.rotate(body);
  }
  return std::get<synth::ConstantVelocity>(cfg.ego).velocity;
}

TEST(Synth, ParkedEgoSeesNoDoppler) {
  synth::ScenarioConfig cfg = noise_free("straight-15kmh");
  cfg.objects.clear();
  cfg.ego = synth::ConstantVelocity{Vec3::Zero()};
  cfg.duration = 0.5;
  const auto [seq, truth] = synth::simulate(cfg);
  ASSERT_EQ(seq.frames.size(), 5u);
  for (const auto& f : seq.frames) {
    ASSERT_FALSE(f.radar.empty());
    for (const auto& p : f.radar) EXPECT_EQ(p.v_rr, 0.0);
  }
  for (const auto& f : truth.frames) {
    for (const auto& t : f.radar) EXPECT_FALSE(t.dynamic);
  }
}

TEST(Synth, PoleDeadAhead) {
  synth::ScenarioConfig cfg;
  cfg.duration = 0.3;
  cfg.ego = synth::ConstantVelocity{Vec3(15.0 / 3.6, 0, 0)};
  synth::Pole pole;
  pole.position = Eigen::Vector2d(30.0, 0.0);
  pole.radius = 1e-3;
  pole.height = 1e-6;
  pole.radar_scatterers = 1;
  cfg.poles.push_back(pole);
  cfg.radar_mounting = RigidTransform::Translation(Vec3(3.5, 0, 0));
  const auto [seq, truth] = synth::simulate(cfg);
  for (const auto& f : seq.frames) {
    ASSERT_EQ(f.radar.size(), 1u);
    const Vec3 u = f.radar[0].position.normalized();
    EXPECT_NEAR(f.radar[0].v_rr, -15.0 / 3.6 * u.x(), 1e-12);
    EXPECT_NEAR(f.radar[0].v_rr, -15.0 / 3.6, 1e-6);
    EXPECT_NEAR(f.radar[0].v_rr, -4.167, 1e-3);
  }
}

TEST(Synth, OncomingCarClosingSpeed) {
  const auto [seq, truth] = synth::simulate(noise_free("oncoming-car"));
  const double closing = 5.0 + 15.0 / 3.6;
  int checked = 0;
  for (std::size_t k = 0; k < seq.frames.size(); ++k) {
    for (std::size_t i = 0; i < seq.frames[k].radar.size(); ++i) {
      if (!truth.frames[k].radar[i].dynamic) continue;
      const Vec3 u = seq.frames[k].radar[i].position.normalized();
      EXPECT_NEAR(seq.frames[k].radar[i].v_rr, -closing * u.x(), 1e-9);
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

class BuiltinScenario : public ::testing::TestWithParam<std::string> {};

TEST_P(BuiltinScenario, VrrRederivesFromTruth) {
  const synth::ScenarioConfig cfg = noise_free(GetParam());
  const auto [seq, truth] = synth::simulate(cfg);
  ASSERT_EQ(truth.frames.size(), seq.frames.size());
  for (std::size_t k = 0; k < seq.frames.size(); ++k) {
    const synth::FrameTruth& ft = truth.frames[k];
    std::map<int, Vec3> object_velocity;
    for (const auto& o : ft.objects) object_velocity[o.track_id] = o.velocity;
    const RigidTransform sensor = ft.ego_pose * cfg.radar_mounting;
    const Vec3 v_sensor = sensor_velocity_world(cfg, ft.ego_pose);
    ASSERT_EQ(ft.radar.size(), seq.frames[k].radar.size());
    for (std::size_t i = 0; i < ft.radar.size(); ++i) {
      const auto& t = ft.radar[i];
      const Vec3 v_point = t.track_id < 0 ? Vec3::Zero() : object_velocity.at(t.track_id);
      const Vec3 u = t.true_position.normalized();
      const double expected = u.dot(sensor.rotation().conjugate() * (v_point - v_sensor));
      EXPECT_NEAR(t.true_vrr, expected, 1e-12);
      EXPECT_NEAR(seq.frames[k].radar[i].v_rr, expected, 1e-12);
      EXPECT_EQ(seq.frames[k].radar[i].position, t.true_position);
    }
  }
}

TEST_P(BuiltinScenario, StaticScatterersFollowEgoMotion) {
  const synth::ScenarioConfig cfg = noise_free(GetParam());
  const auto [seq, truth] = synth::simulate(cfg);
  const RigidTransform mount = cfg.radar_mounting;
  int checked = 0;
  for (std::size_t k = 1; k < seq.frames.size(); ++k) {
    std::map<int, Vec3> prev;
    for (const auto& t : truth.frames[k - 1].radar) {
      if (t.track_id < 0) prev[t.scatterer] = t.true_position;
    }
    const RigidTransform step = mount.inverse() * truth.ego_motion[k - 1].transform * mount;
    for (const auto& t : truth.frames[k].radar) {
      const auto it = prev.find(t.scatterer);
      if (t.track_id >= 0 || it == prev.end()) continue;
      EXPECT_LT((step.apply(it->second) - t.true_position).norm(), 1e-12);
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

TEST_P(BuiltinScenario, GroundTruthConsistent) {
  const auto [seq, truth] = synth::simulate(synth::builtin_scenario(GetParam()));
  ASSERT_GE(seq.frames.size(), 10u);
  ASSERT_EQ(truth.ego_motion.size(), seq.frames.size() - 1);
  ASSERT_TRUE(seq.ground_truth.has_value());
  for (std::size_t k = 1; k < seq.frames.size(); ++k) {
    EXPECT_GT(seq.frames[k].timestamp, seq.frames[k - 1].timestamp);
    const auto& e = truth.ego_motion[k - 1];
    EXPECT_EQ(e.from_frame, seq.frames[k - 1].id);
    EXPECT_EQ(e.to_frame, seq.frames[k].id);
    const RigidTransform from_poses = seq.ego_pose(k)->inverse() * *seq.ego_pose(k - 1);
    EXPECT_LT(testing_support::max_abs_diff(testing_support::to_m4(from_poses),
                                            testing_support::to_m4(e.transform)),
              1e-12);
  }
  for (std::size_t k = 0; k < seq.frames.size(); ++k) {
    EXPECT_EQ(truth.frames[k].lidar_dynamic.size(), seq.frames[k].lidar.size());
    for (const auto& p : seq.frames[k].radar) {
      EXPECT_LE(p.position.norm(), synth::builtin_scenario(GetParam()).max_range + 1.0);
    }
  }
}

TEST_P(BuiltinScenario, SameSeedSameBytes) {
  testing_support::TempDir dir("synth");
  const synth::ScenarioConfig cfg = synth::builtin_scenario(GetParam());
  write_sequence(synth::simulate(cfg).first, dir.path() / "a");
  write_sequence(synth::simulate(cfg).first, dir.path() / "b");
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir.path() / "a")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), dir.path() / "a");
    ASSERT_TRUE(fs::exists(dir.path() / "b" / rel)) << rel;
    EXPECT_EQ(slurp(entry.path()), slurp(dir.path() / "b" / rel)) << rel;
    ++files;
  }
  EXPECT_GT(files, 10u);
}

TEST_P(BuiltinScenario, JsonRoundTrip) {
  const synth::ScenarioConfig cfg = synth::builtin_scenario(GetParam());
  const std::string text = synth::scenario_to_json(cfg);
  const synth::ScenarioConfig back = synth::scenario_from_json(text);
  EXPECT_EQ(synth::scenario_to_json(back), text);
}

INSTANTIATE_TEST_SUITE_P(All, BuiltinScenario,
                         ::testing::ValuesIn(synth::builtin_scenario_names()),
                         [](const auto& info) {
                           std::string name = info.param;
                           std::replace(name.begin(), name.end(), '-', '_');
                           return name;
                         });

TEST(Synth, NamesAndErrors) {
  const auto names = synth::builtin_scenario_names();
  const std::set<std::string> set(names.begin(), names.end());
  for (const char* n : {"straight-15kmh", "turn", "oncoming-car", "crossing-cyclist",
                        "cluttered-urban"}) {
    EXPECT_TRUE(set.contains(n)) << n;
  }
  EXPECT_THROW(synth::builtin_scenario("nope"), Error);
  EXPECT_THROW(synth::scenario_from_json("{"), Error);

  synth::ScenarioConfig cfg;
  cfg.duration = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.noise.dropout = 1.5;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.drop_every = 1;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  synth::SimObject moving_static;
  moving_static.is_static = true;
  moving_static.velocity = Vec3(1, 0, 0);
  cfg.objects.push_back(moving_static);
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Synth, DroppedTicksGiveIrregularGaps) {
  const auto [seq, truth] = synth::simulate(synth::builtin_scenario("cluttered-urban"));
  std::set<long> gaps;
  for (std::size_t k = 1; k < seq.frames.size(); ++k) {
    EXPECT_EQ(seq.frames[k].id, seq.frames[k - 1].id + 1);
    gaps.insert(std::lround(1e6 * (seq.frames[k].timestamp - seq.frames[k - 1].timestamp)));
  }
  EXPECT_EQ(gaps.size(), 2u);
}

TEST(Synth, DropoutRemovesPoints) {
  synth::ScenarioConfig cfg = noise_free("straight-15kmh");
  cfg.duration = 0.5;
  const std::size_t full = synth::simulate(cfg).first.frames[2].radar.size();
  cfg.noise.dropout = 0.5;
  const auto [seq, truth] = synth::simulate(cfg);
  const std::size_t kept = seq.frames[2].radar.size();
  EXPECT_LT(kept, full);
  EXPECT_GT(kept, full / 4);
  EXPECT_EQ(truth.frames[2].radar.size(), kept);
}

}  // namespace
}  // namespace radaccum
