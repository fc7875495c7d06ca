#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "radaccum/ego_motion.hpp"
#include "radaccum/types.hpp"

namespace radaccum::synth {

/// Ego moves with a fixed world velocity and never rotates.
struct ConstantVelocity {
  Vec3 velocity = Vec3(15.0 / 3.6, 0.0, 0.0);
};

/// Planar arc: constant forward speed and yaw rate, starting at the origin
/// heading along +x.
struct ConstantTurn {
  double speed = 5.0;      // m/s
  double yaw_rate = 0.2;   // rad/s
};

using EgoTrajectory = std::variant<ConstantVelocity, ConstantTurn>;

/// Vertical rectangle standing on z = 0 between two ground-plane endpoints.
struct Wall {
  Eigen::Vector2d start = Eigen::Vector2d::Zero();
  Eigen::Vector2d end = Eigen::Vector2d::UnitX();
  double height = 4.0;
  double lidar_density = 4.0;   // points per m^2 per frame
  double radar_density = 0.05;  // persistent scatterers per m^2
};

struct Pole {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double height = 4.0;
  double radius = 0.15;
  double lidar_density = 20.0;
  int radar_scatterers = 2;
};

/// Horizontal lidar-only patch at z = 0.
struct GroundPatch {
  Eigen::Vector2d min = Eigen::Vector2d::Zero();
  Eigen::Vector2d max = Eigen::Vector2d::Ones();
  double lidar_density = 0.5;
};

/// Box-shaped object moving with constant world velocity and fixed yaw.
/// `position` is the box center at t = 0.
struct SimObject {
  int track_id = 0;
  std::string class_name = "Car";
  Vec3 dimensions = Vec3(4.5, 1.8, 1.6);
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
  Vec3 velocity = Vec3::Zero();
  int scatter_points = 12;
  double lidar_density = 20.0;
  bool is_static = false;  // label flag (e.g. bicycle racks)
};

struct NoiseModel {
  double position_sigma = 0.0;  // m, per axis, radar and lidar
  double vrr_sigma = 0.0;       // m/s
  double dropout = 0.0;         // per-point drop probability
};

struct ScenarioConfig {
  std::string name = "custom";
  double duration = 10.0;    // s
  double frame_rate = 10.0;  // sensor ticks per second
  /// Drop every n-th sensor tick (0 = keep all), giving irregular frame gaps.
  int drop_every = 0;
  EgoTrajectory ego = ConstantVelocity{};
  std::vector<Wall> walls;
  std::vector<Pole> poles;
  std::vector<GroundPatch> ground;
  std::vector<SimObject> objects;
  NoiseModel noise;
  double max_range = 50.0;
  double min_range = 0.5;
  std::uint64_t seed = 1;
  RigidTransform radar_mounting = RigidTransform::Translation(Vec3(3.5, 0.0, 0.8));
  RigidTransform lidar_mounting = RigidTransform::Translation(Vec3(1.5, 0.0, 1.9));

  /// Throws radaccum::Error naming the first invalid field.
  void validate() const;
};

ScenarioConfig scenario_from_json(std::string_view json_text);
std::string scenario_to_json(const ScenarioConfig& cfg);

struct RadarPointTruth {
  int scatterer = -1;
  int track_id = -1;  // -1 for static structure
  bool dynamic = false;
  Vec3 true_position = Vec3::Zero();  // noise-free, radar frame
  double true_vrr = 0.0;              // noise-free
};

struct ObjectTruth {
  int track_id = 0;
  RigidTransform pose;           // object -> world
  Vec3 velocity = Vec3::Zero();  // world frame
};

struct FrameTruth {
  FrameId id = 0;
  double timestamp = 0.0;
  RigidTransform ego_pose;            // ego -> world
  Vec3 sensor_velocity = Vec3::Zero();  // radar frame
  std::vector<RadarPointTruth> radar;   // aligned with the frame's radar points
  std::vector<bool> lidar_dynamic;      // aligned with the frame's lidar points
  std::vector<Vec3> lidar_true_positions;
  std::vector<ObjectTruth> objects;
};

struct GroundTruth {
  std::vector<FrameTruth> frames;
  std::vector<EgoMotionEstimate> ego_motion;  // consecutive pairs, method GroundTruth
  std::vector<Vec3> static_scatterers;  // world frame
};

/// Generates a sequence plus exact ground truth. All randomness comes from
/// generators seeded with cfg.seed.
std::pair<Sequence, GroundTruth> simulate(const ScenarioConfig& cfg);

/// Names: straight-15kmh, turn, oncoming-car, crossing-cyclist, cluttered-urban.
std::vector<std::string> builtin_scenario_names();
/// Throws radaccum::Error for an unknown name.
ScenarioConfig builtin_scenario(std::string_view name);

/// Estimates built from the gt/ego_motion.txt record of a loaded sequence.
std::vector<EgoMotionEstimate> estimates_from_record(const GroundTruthRecord& record);

}  // namespace radaccum::synth
