#include "radaccum/dynamics.hpp"

#include <cmath>
#include <map>

#include "radaccum/doppler.hpp"
#include "radaccum/error.hpp"

namespace radaccum {

Vec3 sensor_velocity_from_ego(const RigidTransform& prev_to_cur, double dt,
                              const RigidTransform& sensor_mounting) {
  if (!(dt > 0.0)) throw Error("time step must be positive");
  // Pose of the current ego frame in previous ego coordinates.
  const Twist xi = log_se3(prev_to_cur.inverse());
  const Vec3 omega = xi.angular / dt;
  const Vec3 v_ego = xi.linear / dt;
  const Vec3 v_sensor_in_ego = v_ego + omega.cross(sensor_mounting.translation());
  return sensor_mounting.rotation().conjugate() * v_sensor_in_ego;
}

double compensated_vrr(const RadarPoint& point, const Vec3& sensor_velocity) {
  return point.v_rr - predicted_static_vrr(point.position, sensor_velocity);
}

std::vector<MotionLabel> segment_static_dynamic(std::span<const RadarPoint> points,
                                                const Vec3& sensor_velocity, double threshold) {
  if (!(threshold > 0.0)) throw Error("segmentation threshold must be positive");
  std::vector<MotionLabel> labels(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    labels[i].residual = std::abs(compensated_vrr(points[i], sensor_velocity));
    labels[i].tag = labels[i].residual > threshold ? MotionTag::Dynamic : MotionTag::Static;
  }
  return labels;
}

std::vector<MotionLabel> segment_static_dynamic(std::span<const RadarPoint> points,
                                                const EgoMotionEstimate& ego, double dt,
                                                double threshold,
                                                const RigidTransform& sensor_mounting) {
  if (!(dt > 0.0)) throw Error("segmentation needs a positive time step");
  return segment_static_dynamic(
      points, sensor_velocity_from_ego(ego.transform, dt, sensor_mounting), threshold);
}

std::vector<std::uint8_t> to_mask(std::span<const MotionLabel> labels) {
  std::vector<std::uint8_t> mask(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    mask[i] = static_cast<std::uint8_t>(labels[i].tag);
  }
  return mask;
}

ObjectMotion object_motion_from_labels(const TrackedBox& box_prev, const TrackedBox& box_cur) {
  if (box_prev.track_id != box_cur.track_id) {
    throw Error("object motion needs matching track ids (" + std::to_string(box_prev.track_id) +
                " vs " + std::to_string(box_cur.track_id) + ")");
  }
  const RigidTransform turn = RigidTransform::FromYaw(wrap_angle(box_cur.yaw - box_prev.yaw));
  ObjectMotion motion;
  motion.track_id = box_cur.track_id;
  motion.transform = RigidTransform(turn.rotation(), box_cur.center - turn.rotate(box_prev.center));
  return motion;
}

std::vector<Vec3> dyn_gt_correct(std::span<const Vec3> points_in_current,
                                 std::span<const TrackedBox> labels_prev,
                                 std::span<const TrackedBox> labels_cur,
                                 const RigidTransform& prev_to_cur, double margin) {
  std::map<int, const TrackedBox*> current;
  for (const TrackedBox& b : labels_cur) current.emplace(b.track_id, &b);

  struct Region {
    TrackedBox dilated;
    RigidTransform motion;
  };
  std::vector<Region> regions;
  for (const TrackedBox& b : labels_prev) {
    const auto it = current.find(b.track_id);
    if (it == current.end()) continue;  // track lost: nothing to move by
    const TrackedBox moved = transform_box(prev_to_cur, b);
    regions.push_back({dilate_box(moved, margin),
                       object_motion_from_labels(moved, *it->second).transform});
  }

  std::vector<Vec3> out(points_in_current.begin(), points_in_current.end());
  for (Vec3& p : out) {
    for (const Region& r : regions) {
      if (box_contains(r.dilated, p)) {
        p = r.motion.apply(p);
        break;
      }
    }
  }
  return out;
}

Vec3 dyn_vrr_correct(const Vec3& position, double compensated_vrr, double elapsed) {
  const double range = position.norm();
  if (!(range > 0.0)) throw Error("undefined line of sight for a zero-range detection");
  return position + (compensated_vrr * elapsed / range) * position;
}

}  // namespace radaccum
