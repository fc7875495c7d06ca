#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "radaccum/ego_motion.hpp"

namespace radaccum {

enum class DopplerMotionModel { TranslationOnly, AckermannSingleTrack };

struct DopplerConfig {
  int ransac_iterations = 200;
  double inlier_threshold = 0.15;  // m/s
  int min_inliers = 10;
  std::uint64_t seed = 42;
  DopplerMotionModel motion_model = DopplerMotionModel::TranslationOnly;
  RigidTransform sensor_mounting;  // sensor -> ego

  void validate() const;
};

struct DopplerResult {
  EgoMotionEstimate estimate;
  Vec3 sensor_velocity = Vec3::Zero();  // sensor frame, m/s
  Vec3 ego_velocity = Vec3::Zero();     // ego frame, m/s
  double yaw_rate = 0.0;                // rad/s, AckermannSingleTrack only
  std::vector<bool> inliers;            // per input point
};

/// Radial velocity a static target at `position` shows to a sensor moving
/// with `sensor_velocity` (both in the sensor frame): -u^T v_sensor.
double predicted_static_vrr(const Vec3& position, const Vec3& sensor_velocity);

/// Least-squares sensor velocity from static detections; no outlier handling.
/// Throws "velocity under-determined" when the line-of-sight directions do not
/// span 3D.
Vec3 fit_sensor_velocity(std::span<const RadarPoint> points);

/// Single-frame ego motion from radial velocities. RANSAC (seeded,
/// deterministic) separates static detections, a least-squares refit on the
/// consensus set gives the sensor velocity, and the motion model turns it into
/// the transform for the interval of length `dt` ending at this frame.
DopplerResult em_doppler(std::span<const RadarPoint> points, FrameId from, FrameId to, double dt,
                         const DopplerConfig& cfg);

}  // namespace radaccum
