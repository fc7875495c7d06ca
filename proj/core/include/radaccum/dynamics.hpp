#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "radaccum/box.hpp"
#include "radaccum/ego_motion.hpp"

namespace radaccum {

/// Default |v_rr residual| above which a detection counts as moving.
inline constexpr double kDefaultSegmentationThreshold = 0.4;  // m/s

enum class MotionTag : std::uint8_t { Static = 0, Dynamic = 1 };

struct MotionLabel {
  MotionTag tag = MotionTag::Static;
  double residual = 0.0;  // m/s, >= 0
};

/// Object motion between two frames, expressed in the current ego frame:
/// maps the object's previous pose onto its current pose.
struct ObjectMotion {
  int track_id = 0;
  RigidTransform transform;
};

/// Velocity of the sensor in its own frame at the end of the interval
/// described by `ego` (previous -> current), assuming constant body twist.
Vec3 sensor_velocity_from_ego(const RigidTransform& prev_to_cur, double dt,
                              const RigidTransform& sensor_mounting);

/// Over-ground radial velocity of a detection: the raw v_rr minus what a
/// static target would show, v_rr + u^T v_sensor.
double compensated_vrr(const RadarPoint& point, const Vec3& sensor_velocity);

std::vector<MotionLabel> segment_static_dynamic(std::span<const RadarPoint> points,
                                                const Vec3& sensor_velocity, double threshold);

/// Segmentation driven by an ego-motion estimate covering the interval of
/// length `dt` that ends at this frame. Throws on dt <= 0 or threshold <= 0.
std::vector<MotionLabel> segment_static_dynamic(std::span<const RadarPoint> points,
                                                const EgoMotionEstimate& ego, double dt,
                                                double threshold,
                                                const RigidTransform& sensor_mounting);

std::vector<std::uint8_t> to_mask(std::span<const MotionLabel> labels);

/// Rotation by the yaw change about the previous center, then translation of
/// that center onto the current one. Boxes must share a coordinate frame.
ObjectMotion object_motion_from_labels(const TrackedBox& box_prev, const TrackedBox& box_cur);

/// Label-driven correction of points that were already moved into the current
/// ego frame. `labels_prev` are expressed in the previous ego frame and
/// `prev_to_cur` carries them over; points inside a (margin-dilated) previous
/// box of a track that is still present get that track's ObjectMotion.
/// Points of lost tracks and unlabeled points are left unchanged.
std::vector<Vec3> dyn_gt_correct(std::span<const Vec3> points_in_current,
                                 std::span<const TrackedBox> labels_prev,
                                 std::span<const TrackedBox> labels_cur,
                                 const RigidTransform& prev_to_cur,
                                 double margin = kDefaultBoxMargin);

/// Shifts a detection along its measurement-time line of sight by
/// compensated_vrr * elapsed. Throws "undefined line of sight" at zero range.
Vec3 dyn_vrr_correct(const Vec3& position, double compensated_vrr, double elapsed);

}  // namespace radaccum
