#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "radaccum/geometry.hpp"

namespace radaccum {

using FrameId = std::uint32_t;

/// One radar detection in the sensor frame.
///
/// `v_rr` is the raw (not ego-compensated) relative radial velocity, positive
/// when the target recedes from the sensor. A missing RCS is encoded as NaN.
struct RadarPoint {
  Vec3 position = Vec3::Zero();
  double rcs = std::numeric_limits<double>::quiet_NaN();
  double v_rr = 0.0;
};

struct LidarPoint {
  Vec3 position = Vec3::Zero();
  double intensity = 0.0;  // [0, 1]
};

/// Oriented 3D label box, expressed in the ego frame of its frame.
/// `center` is the geometric center; dimensions are (length, width, height)
/// along the box x/y/z axes; yaw rotates the box about ego +z.
struct TrackedBox {
  int track_id = 0;
  std::string class_name;
  Vec3 center = Vec3::Zero();
  Vec3 dimensions = Vec3::Ones();
  double yaw = 0.0;
  FrameId frame_id = 0;
  bool is_static = false;
};

template <typename Point>
struct PointCloudFrame {
  FrameId frame_id = 0;
  double timestamp = 0.0;
  std::optional<RigidTransform> sensor_pose;  // sensor -> world
  std::vector<Point> points;
};

using RadarFrame = PointCloudFrame<RadarPoint>;
using LidarFrame = PointCloudFrame<LidarPoint>;

/// Everything recorded at one time step of a sequence.
struct SequenceFrame {
  FrameId id = 0;
  double timestamp = 0.0;            // seconds
  std::optional<Mat4> ego_to_world;  // kept as the raw matrix for exact I/O
  std::vector<RadarPoint> radar;     // radar sensor frame
  std::vector<LidarPoint> lidar;     // lidar sensor frame
  std::vector<TrackedBox> labels;    // ego frame
};

struct GroundTruthEgoMotion {
  FrameId from = 0;
  FrameId to = 0;
  Mat4 transform = Mat4::Identity();  // from-ego coordinates -> to-ego coordinates
};

struct GroundTruthObjectState {
  FrameId frame = 0;
  int track_id = 0;
  Vec3 velocity = Vec3::Zero();  // world frame, m/s
};

/// Ground truth as written by the simulator under seq/gt/.
struct GroundTruthRecord {
  std::vector<GroundTruthEgoMotion> ego_motion;
  std::vector<GroundTruthObjectState> objects;
};

struct Sequence {
  Mat4 radar_to_ego = Mat4::Identity();
  Mat4 lidar_to_ego = Mat4::Identity();
  std::vector<SequenceFrame> frames;  // strictly increasing timestamps
  std::optional<GroundTruthRecord> ground_truth;

  RigidTransform radar_mounting() const { return RigidTransform::FromMatrix(radar_to_ego); }
  RigidTransform lidar_mounting() const { return RigidTransform::FromMatrix(lidar_to_ego); }
  std::optional<RigidTransform> ego_pose(std::size_t index) const;

  /// Index of the frame with the given id; throws radaccum::Error if absent.
  std::size_t index_of(FrameId id) const;
  RadarFrame radar_frame(std::size_t index) const;
  LidarFrame lidar_frame(std::size_t index) const;
};

}  // namespace radaccum
