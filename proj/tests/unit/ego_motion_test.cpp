#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "radaccum/doppler.hpp"
#include "radaccum/ego_motion.hpp"
#include "radaccum/error.hpp"
#include "radaccum/gicp.hpp"
#include "radaccum/metrics.hpp"
#include "test_support.hpp"

namespace radaccum {
namespace {

using testing_support::max_abs_diff;
using testing_support::to_m4;
using testing_support::to_v3;

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kSpeed = 15.0 / 3.6;

// ---------------------------------------------------------------------------
// Pose differences

TEST(EmFromPose, LandmarkOracle) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const RigidTransform prev = testing_support::random_transform(rng, 50.0);
    const RigidTransform cur = testing_support::random_transform(rng, 50.0);
    const EgoMotionEstimate e = em_from_pose(3, 4, prev, cur);
    EXPECT_EQ(e.method, EgoMethod::Pose);
    for (const Vec3& world : testing_support::random_points(rng, 10, 100.0)) {
      const oracle::V3 in_prev = oracle::apply(oracle::rigid_inverse(to_m4(prev)), to_v3(world));
      const oracle::V3 in_cur = oracle::apply(oracle::rigid_inverse(to_m4(cur)), to_v3(world));
      const Vec3 moved = e.transform.apply(Vec3(in_prev[0], in_prev[1], in_prev[2]));
      EXPECT_LT(oracle::dist(to_v3(moved), in_cur), 1e-9);
    }
  }
}

TEST(EmFromPose, ForwardMotionMovesLandmarksBack) {
  const RigidTransform prev = RigidTransform::Identity();
  const RigidTransform cur = RigidTransform::Translation(Vec3(0.4167, 0, 0));
  const EgoMotionEstimate e = em_from_pose(0, 1, prev, cur);
  EXPECT_NEAR(e.transform.translation().x(), -0.4167, 1e-15);
  const Vec3 landmark(10, 2, 0);
  EXPECT_LT((e.transform.apply(landmark) - Vec3(10 - 0.4167, 2, 0)).norm(), 1e-12);
  EXPECT_LT(em_from_pose(0, 1, cur, cur).transform.translation().norm(), 1e-15);
}

TEST(EmFromPose, QuarterTurn) {
  const RigidTransform prev = RigidTransform::Identity();
  const RigidTransform cur = RigidTransform::FromYaw(std::numbers::pi / 2);
  const EgoMotionEstimate e = em_from_pose(0, 1, prev, cur);
  EXPECT_NEAR(e.transform.yaw(), -std::numbers::pi / 2, 1e-12);
  // A landmark straight ahead before the turn sits on the right afterwards.
  EXPECT_LT((e.transform.apply(Vec3(5, 0, 0)) - Vec3(0, -5, 0)).norm(), 1e-12);
}

// ---------------------------------------------------------------------------
// Static objects

std::vector<TrackedBox> static_boxes(const std::vector<Vec3>& centers, bool is_static = true) {
  std::vector<TrackedBox> out;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    TrackedBox b;
    b.track_id = static_cast<int>(i) + 10;
    b.center = centers[i];
    b.is_static = is_static;
    out.push_back(b);
  }
  return out;
}

TEST(EmStaticObjects, ExactRecovery) {
  const RigidTransform motion = RigidTransform::FromYaw(3 * kDeg, Vec3(-0.42, 0.03, 0.0));
  const std::vector<Vec3> prev{{6, -5.5, 0.5}, {12, 5.5, 0.5}, {34, -5.5, 0.5}, {40, 5.5, 1.2}};
  std::vector<Vec3> cur;
  for (const Vec3& c : prev) cur.push_back(motion.apply(c));
  const EgoMotionEstimate e = em_static_objects(0, 1, static_boxes(prev), static_boxes(cur));
  EXPECT_EQ(e.method, EgoMethod::StaticObjects);
  EXPECT_EQ(e.diagnostics.inlier_count, 4);
  EXPECT_LT(max_abs_diff(to_m4(e.transform), to_m4(motion)), 1e-12);

  const EgoMotionEstimate back = em_static_objects(1, 0, static_boxes(cur), static_boxes(prev));
  EXPECT_LT(max_abs_diff(to_m4(back.transform * e.transform), oracle::identity4()), 1e-9);

  const EgoMotionEstimate same = em_static_objects(0, 1, static_boxes(prev), static_boxes(prev));
  EXPECT_LT(max_abs_diff(to_m4(same.transform), oracle::identity4()), 1e-12);
}

TEST(EmStaticObjects, IgnoresMovingAndUnmatched) {
  const std::vector<Vec3> prev{{6, -5, 0}, {12, 5, 0}, {30, -5, 1}};
  auto a = static_boxes(prev);
  auto b = static_boxes(prev);
  TrackedBox mover;
  mover.track_id = 99;
  mover.center = Vec3(20, 0, 0);
  a.push_back(mover);
  mover.center = Vec3(25, 0, 0);
  b.push_back(mover);
  TrackedBox lonely;
  lonely.track_id = 7;
  lonely.is_static = true;
  a.push_back(lonely);
  const EgoMotionEstimate e = em_static_objects(0, 1, a, b);
  EXPECT_EQ(e.diagnostics.inlier_count, 3);
  EXPECT_LT(e.transform.translation().norm(), 1e-12);
}

TEST(EmStaticObjects, InsufficientObjects) {
  const std::vector<Vec3> two{{6, -5, 0}, {12, 5, 0}};
  try {
    em_static_objects(0, 1, static_boxes(two), static_boxes(two));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("insufficient static objects"), std::string::npos);
  }
  const std::vector<Vec3> line{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  try {
    em_static_objects(0, 1, static_boxes(line), static_boxes(line));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("insufficient static objects"), std::string::npos);
  }
  const std::vector<Vec3> four{{6, -5, 0}, {12, 5, 0}, {30, -5, 1}, {3, 3, 3}};
  EXPECT_THROW(em_static_objects(0, 1, static_boxes(four, false), static_boxes(four, false)), Error);
}

// ---------------------------------------------------------------------------
// Chains and smoothing

EgoMotionEstimate step(FrameId from, const RigidTransform& t) {
  EgoMotionEstimate e;
  e.from_frame = from;
  e.to_frame = from + 1;
  e.transform = t;
  e.method = EgoMethod::Gicp;
  return e;
}

TEST(ComposeChain, Basics) {
  const std::vector<EgoMotionEstimate> chain{step(0, RigidTransform::Translation(Vec3(0.1, 0, 0))),
                                             step(1, RigidTransform::Translation(Vec3(0.1, 0, 0)))};
  EXPECT_LT(compose_chain(chain, 1, 1).translation().norm(), 1e-15);
  EXPECT_NEAR(compose_chain(chain, 0, 2).translation().x(), 0.2, 1e-15);
  EXPECT_NEAR(compose_chain(chain, 2, 0).translation().x(), -0.2, 1e-15);
  EXPECT_THROW(compose_chain(chain, 0, 3), Error);
  const std::vector<EgoMotionEstimate> gap{chain[0], step(2, RigidTransform::Identity())};
  try {
    compose_chain(gap, 0, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("gap"), std::string::npos);
  }
}

TEST(ComposeChain, MatchesEndpointPoses) {
  std::mt19937_64 rng(6);
  std::vector<RigidTransform> poses;
  for (int i = 0; i < 6; ++i) poses.push_back(testing_support::random_transform(rng, 10.0));
  std::vector<EgoMotionEstimate> chain;
  for (FrameId i = 0; i < 5; ++i) chain.push_back(em_from_pose(i, i + 1, poses[i], poses[i + 1]));
  const RigidTransform direct = em_from_pose(0, 5, poses[0], poses[5]).transform;
  oracle::M4 product = oracle::identity4();
  for (const auto& e : chain) product = oracle::mul(to_m4(e.transform), product);
  EXPECT_LT(max_abs_diff(to_m4(compose_chain(chain, 0, 5)), to_m4(direct)), 1e-9);
  EXPECT_LT(max_abs_diff(product, to_m4(direct)), 1e-9);
}

TEST(EmSmooth, WindowOneIsIdentity) {
  std::mt19937_64 rng(7);
  std::vector<EgoMotionEstimate> chain;
  for (FrameId i = 0; i < 8; ++i) chain.push_back(step(i, testing_support::random_transform(rng, 1.0)));
  const auto out = em_smooth(chain, 1);
  ASSERT_EQ(out.size(), chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    EXPECT_LT(max_abs_diff(to_m4(out[i].transform), to_m4(chain[i].transform)), 1e-12);
    EXPECT_EQ(out[i].method, EgoMethod::SmoothedGicp);
  }
}

TEST(EmSmooth, ConstantMotionIsFixedPoint) {
  const RigidTransform motion = RigidTransform::FromYaw(0.02, Vec3(-0.4, 0.01, 0));
  std::vector<EgoMotionEstimate> chain;
  for (FrameId i = 0; i < 12; ++i) chain.push_back(step(i, motion));
  for (const auto& e : em_smooth(chain, 6)) {
    EXPECT_LT(max_abs_diff(to_m4(e.transform), to_m4(motion)), 1e-12);
  }
}

TEST(EmSmooth, AlternatingTranslationsAverage) {
  std::vector<EgoMotionEstimate> chain;
  for (FrameId i = 0; i < 12; ++i) {
    chain.push_back(step(i, RigidTransform::Translation(Vec3(i % 2 == 0 ? 0.35 : 0.45, 0, 0))));
  }
  const auto out = em_smooth(chain, 6);
  for (std::size_t i = 5; i < out.size(); ++i) {
    EXPECT_NEAR(out[i].transform.translation().x(), 0.40, 1e-12);
  }
  // Trailing prefix windows at the start.
  EXPECT_NEAR(out[0].transform.translation().x(), 0.35, 1e-12);
  EXPECT_NEAR(out[2].transform.translation().x(), (0.35 + 0.45 + 0.35) / 3, 1e-12);
}

TEST(EmSmooth, RejectsGaps) {
  const std::vector<EgoMotionEstimate> gap{step(0, RigidTransform::Identity()),
                                           step(2, RigidTransform::Identity())};
  EXPECT_THROW(em_smooth(gap, 6), Error);
  EXPECT_THROW(em_smooth(gap, 0), Error);
}

// ---------------------------------------------------------------------------
// GICP

// Two perpendicular walls and a ground plane, regularly sampled.
std::vector<Vec3> structured_scene(double spacing) {
  std::vector<Vec3> pts;
  for (double x = -10; x <= 20; x += spacing)
    for (double z = 0.1; z <= 3; z += spacing) pts.emplace_back(x, 5.0, z);
  for (double y = -5; y <= 5; y += spacing)
    for (double z = 0.1; z <= 3; z += spacing) pts.emplace_back(20.0, y, z);
  for (double x = -10; x <= 20; x += spacing)
    for (double y = -5; y <= 4.9; y += spacing) pts.emplace_back(x, y, 0.0);
  return pts;
}

void expect_non_increasing(const std::vector<double>& history) {
  for (std::size_t i = 1; i < history.size(); ++i) EXPECT_LE(history[i], history[i - 1]);
}

TEST(EmGicp, IdenticalCloudsConvergeImmediately) {
  const std::vector<Vec3> scene = structured_scene(0.3);
  const EgoMotionEstimate e =
      em_gicp(scene, scene, 0, 1, RigidTransform::Identity(), GicpConfig::Radar());
  EXPECT_LT(e.transform.translation().norm(), 1e-6);
  EXPECT_LT(e.transform.angle(), 1e-6);
  EXPECT_LE(e.diagnostics.iterations, 5);
  expect_non_increasing(e.diagnostics.cost_history);
}

TEST(EmGicp, RecoversKnownMotionNoiseFree) {
  const std::vector<Vec3> source = structured_scene(0.25);
  const RigidTransform truth = RigidTransform::FromYaw(2 * kDeg, Vec3(0.3, 0.05, 0));
  std::vector<Vec3> target;
  for (const Vec3& p : source) target.push_back(truth.apply(p));
  const EgoMotionEstimate e =
      em_gicp(source, target, 0, 1, RigidTransform::Identity(), GicpConfig::Radar());
  const EgoMotionError err = ego_motion_error(e.transform, truth);
  EXPECT_LT(err.translation_error, 1e-3);
  EXPECT_LT(err.rotation_error, 0.01);
  EXPECT_GT(e.diagnostics.iterations, 1);
  EXPECT_GT(e.diagnostics.inlier_count, 0);
  expect_non_increasing(e.diagnostics.cost_history);
}

TEST(EmGicp, RecoversKnownMotionWithNoise) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> noise(0.0, 0.02);
  const std::vector<Vec3> scene = structured_scene(0.25);
  const RigidTransform truth = RigidTransform::FromYaw(2 * kDeg, Vec3(0.3, 0.05, 0));
  std::vector<Vec3> source, target;
  for (const Vec3& p : scene) {
    source.push_back(p + Vec3(noise(rng), noise(rng), noise(rng)));
    target.push_back(truth.apply(p) + Vec3(noise(rng), noise(rng), noise(rng)));
  }
  const EgoMotionEstimate e =
      em_gicp(source, target, 0, 1, RigidTransform::Identity(), GicpConfig::Lidar());
  EXPECT_LT(ego_motion_error(e.transform, truth).translation_error, 0.02);
  expect_non_increasing(e.diagnostics.cost_history);
}

TEST(EmGicp, Errors) {
  const std::vector<Vec3> few(5, Vec3::Zero());
  const std::vector<Vec3> scene = structured_scene(0.5);
  EXPECT_THROW(em_gicp(few, scene, 0, 1, RigidTransform::Identity(), GicpConfig::Radar()), Error);
  std::vector<Vec3> far;
  for (const Vec3& p : scene) far.push_back(p + Vec3(500, 0, 0));
  try {
    em_gicp(scene, far, 0, 1, RigidTransform::Identity(), GicpConfig::Radar());
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("registration diverged"), std::string::npos);
  }
  GicpConfig bad;
  bad.max_iterations = 0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(VoxelDownsample, OrderIndependentCentroids) {
  std::mt19937_64 rng(3);
  std::vector<Vec3> pts = testing_support::random_points(rng, 2000, 2.0);
  const auto a = voxel_downsample(pts, 0.5);
  std::shuffle(pts.begin(), pts.end(), rng);
  const auto b = voxel_downsample(pts, 0.5);
  ASSERT_EQ(a.size(), b.size());
  EXPECT_LE(a.size(), 8u * 8u * 8u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT((a[i] - b[i]).norm(), 1e-12);
  EXPECT_EQ(voxel_downsample(pts, 0.0).size(), pts.size());
}

// ---------------------------------------------------------------------------
// Doppler

struct DopplerScene {
  std::vector<RadarPoint> points;
  std::vector<bool> moving;
};

// Static scatterers around the sensor plus a fraction of points on objects
// moving with `object_velocity` (sensor frame).
DopplerScene doppler_scene(std::uint64_t seed, std::size_t n, const Vec3& sensor_velocity,
                           double moving_fraction = 0.0, double vrr_sigma = 0.0,
                           const Vec3& object_velocity = Vec3(3, 0, 0)) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> range(3.0, 50.0), az(-1.2, 1.2), el(-0.25, 0.25);
  std::normal_distribution<double> noise(0.0, 1.0);
  DopplerScene s;
  const auto moving = static_cast<std::size_t>(std::llround(moving_fraction * n));
  for (std::size_t i = 0; i < n; ++i) {
    RadarPoint p;
    p.position = to_cartesian({range(rng), az(rng), el(rng)});
    const bool dyn = i < moving;
    const Vec3 u = p.position.normalized();
    const Vec3 v_point = dyn ? object_velocity : Vec3::Zero();
    p.v_rr = u.dot(v_point - sensor_velocity) + vrr_sigma * noise(rng);
    s.points.push_back(p);
    s.moving.push_back(dyn);
  }
  return s;
}

TEST(EmDoppler, ZeroVelocity) {
  DopplerScene s = doppler_scene(1, 100, Vec3::Zero());
  const DopplerResult r = em_doppler(s.points, 0, 1, 0.1, DopplerConfig{});
  EXPECT_LT(r.sensor_velocity.norm(), 1e-12);
  EXPECT_LT(r.estimate.transform.translation().norm(), 1e-12);
}

TEST(EmDoppler, ExactOnStaticScene) {
  const Vec3 v(kSpeed, 0, 0);
  const DopplerScene s = doppler_scene(2, 150, v);
  const DopplerResult r = em_doppler(s.points, 0, 1, 0.1, DopplerConfig{});
  EXPECT_LT((r.sensor_velocity - v).norm(), 1e-9);
  EXPECT_LT((r.estimate.transform.translation() - Vec3(-kSpeed * 0.1, 0, 0)).norm(), 1e-10);
  EXPECT_EQ(r.estimate.method, EgoMethod::Doppler);
  EXPECT_EQ(r.estimate.diagnostics.inlier_count, 150);
}

TEST(EmDoppler, PredictedStaticVrrSign) {
  // Driving towards a target straight ahead: the range shrinks, v_rr < 0.
  EXPECT_NEAR(predicted_static_vrr(Vec3(10, 0, 0), Vec3(kSpeed, 0, 0)), -kSpeed, 1e-15);
  EXPECT_NEAR(predicted_static_vrr(Vec3(0, 10, 0), Vec3(kSpeed, 0, 0)), 0.0, 1e-15);
}

TEST(EmDoppler, RobustToMovingPointsAndNoise) {
  const Vec3 v(kSpeed, 0, 0);
  const DopplerScene s = doppler_scene(3, 200, v, 0.3, 0.05);
  const DopplerResult r = em_doppler(s.points, 0, 1, 0.1, DopplerConfig{});
  EXPECT_LT((r.sensor_velocity - v).norm(), 0.1);
  std::size_t moving = 0, excluded = 0;
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    if (!s.moving[i]) continue;
    ++moving;
    excluded += r.inliers[i] ? 0 : 1;
  }
  EXPECT_GE(static_cast<double>(excluded), 0.95 * static_cast<double>(moving));
}

TEST(EmDoppler, BreakdownSweep) {
  const Vec3 v(kSpeed, 0.2, 0);
  for (double fraction : {0.1, 0.3, 0.45}) {
    const DopplerScene s = doppler_scene(4, 200, v, fraction);
    const DopplerResult r = em_doppler(s.points, 0, 1, 0.1, DopplerConfig{});
    EXPECT_LT((r.estimate.transform.translation() + v * 0.1).norm(), 1e-6) << fraction;
  }
}

TEST(EmDoppler, PermutationInvariant) {
  const DopplerScene s = doppler_scene(5, 120, Vec3(kSpeed, 0, 0), 0.2);
  std::vector<RadarPoint> shuffled = s.points;
  std::mt19937_64 rng(1);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const DopplerResult a = em_doppler(s.points, 0, 1, 0.1, DopplerConfig{});
  const DopplerResult b = em_doppler(shuffled, 0, 1, 0.1, DopplerConfig{});
  EXPECT_EQ(a.sensor_velocity, b.sensor_velocity);
  EXPECT_EQ(a.estimate.transform.translation(), b.estimate.transform.translation());
}

TEST(EmDoppler, MountingRotatesVelocity) {
  // Sensor yawed 90 deg to the left: forward ego motion appears along -y.
  DopplerConfig cfg;
  cfg.sensor_mounting = RigidTransform::FromYaw(std::numbers::pi / 2, Vec3(1, 0, 0.5));
  const DopplerScene s = doppler_scene(6, 100, Vec3(0, -kSpeed, 0));
  const DopplerResult r = em_doppler(s.points, 0, 1, 0.1, cfg);
  EXPECT_LT((r.ego_velocity - Vec3(kSpeed, 0, 0)).norm(), 1e-9);
}

TEST(EmDoppler, AckermannRecoversYawRate) {
  // Ego: forward speed 5 m/s, yaw rate 0.2 rad/s; sensor 3.5 m ahead of the
  // rear axle sees v + w x lever.
  const double speed = 5.0, yaw_rate = 0.2, dt = 0.1;
  DopplerConfig cfg;
  cfg.motion_model = DopplerMotionModel::AckermannSingleTrack;
  cfg.sensor_mounting = RigidTransform::Translation(Vec3(3.5, 0, 0.8));
  const Vec3 sensor_v = Vec3(speed, 0, 0) + Vec3(0, 0, yaw_rate).cross(Vec3(3.5, 0, 0.8));
  const DopplerScene s = doppler_scene(7, 150, sensor_v);
  const DopplerResult r = em_doppler(s.points, 0, 1, dt, cfg);
  EXPECT_NEAR(r.yaw_rate, yaw_rate, 1e-9);
  const RigidTransform truth = exp_se3({Vec3(0, 0, yaw_rate * dt), Vec3(speed * dt, 0, 0)}).inverse();
  EXPECT_LT(max_abs_diff(to_m4(r.estimate.transform), to_m4(truth)), 1e-9);
}

TEST(EmDoppler, Errors) {
  const DopplerScene few = doppler_scene(8, 5, Vec3(kSpeed, 0, 0));
  try {
    em_doppler(few.points, 0, 1, 0.1, DopplerConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("insufficient static points"), std::string::npos);
  }
  // All detections in one plane through the sensor.
  std::vector<RadarPoint> planar;
  for (int i = 0; i < 50; ++i) {
    RadarPoint p;
    p.position = Vec3(10 + i, i % 7 - 3.0, 0.0);
    p.v_rr = -p.position.normalized().x() * kSpeed;
    planar.push_back(p);
  }
  EXPECT_THROW(fit_sensor_velocity(planar), Error);
  const DopplerScene ok = doppler_scene(9, 50, Vec3(kSpeed, 0, 0));
  EXPECT_THROW(em_doppler(ok.points, 0, 1, 0.0, DopplerConfig{}), Error);
  DopplerConfig bad;
  bad.inlier_threshold = 0.0;
  EXPECT_THROW(bad.validate(), Error);
  bad = DopplerConfig{};
  bad.min_inliers = 2;
  EXPECT_THROW(bad.validate(), Error);
}

}  // namespace
}  // namespace radaccum
