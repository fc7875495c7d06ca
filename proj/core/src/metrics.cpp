#include "radaccum/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "radaccum/error.hpp"

namespace radaccum {

double mean_nearest_distance(std::span<const Vec3> queries, const SpatialIndex& index) {
  if (queries.empty() || index.empty()) throw Error("chamfer distance of an empty point set");
  double sum = 0.0;
  for (const Vec3& q : queries) sum += index.nearest(q).distance;
  return sum / static_cast<double>(queries.size());
}

double chamfer_symmetric(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) throw Error("chamfer distance of an empty point set");
  const SpatialIndex index_a(std::vector<Vec3>(a.begin(), a.end()));
  const SpatialIndex index_b(std::vector<Vec3>(b.begin(), b.end()));
  return 0.5 * (mean_nearest_distance(a, index_b) + mean_nearest_distance(b, index_a));
}

namespace {

template <typename Point>
std::vector<Vec3> ego_points(const std::vector<Point>& points, const RigidTransform& mounting,
                             const std::vector<bool>* mask, const char* side) {
  if (mask && mask->size() != points.size()) {
    throw Error(std::string("static mask size does not match the ") + side + " frame");
  }
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    out.push_back(mounting.apply(points[i].position));
  }
  return out;
}

}  // namespace

double scd_of_correction(const Sequence& seq, std::size_t frame_index,
                         const RigidTransform& prev_to_cur, const std::vector<bool>* static_prev,
                         const std::vector<bool>* static_cur, ScdSensor sensor) {
  if (frame_index == 0 || frame_index >= seq.frames.size()) {
    throw Error("sCD needs frames k-1 and k inside the sequence");
  }
  const SequenceFrame& prev = seq.frames[frame_index - 1];
  const SequenceFrame& cur = seq.frames[frame_index];
  std::vector<Vec3> moved;
  std::vector<Vec3> target;
  if (sensor == ScdSensor::Lidar) {
    const RigidTransform mount = seq.lidar_mounting();
    moved = ego_points(prev.lidar, mount, static_prev, "previous");
    target = ego_points(cur.lidar, mount, static_cur, "current");
  } else {
    const RigidTransform mount = seq.radar_mounting();
    moved = ego_points(prev.radar, mount, static_prev, "previous");
    target = ego_points(cur.radar, mount, static_cur, "current");
  }
  for (Vec3& p : moved) p = prev_to_cur.apply(p);
  return chamfer_symmetric(moved, target);
}

std::vector<bool> static_mask_from_labels(const SequenceFrame& frame,
                                          const RigidTransform& sensor_mounting, ScdSensor sensor,
                                          double margin) {
  std::vector<TrackedBox> moving;
  for (const TrackedBox& b : frame.labels) {
    if (!b.is_static) moving.push_back(dilate_box(b, margin));
  }
  auto classify = [&](const Vec3& sensor_point) {
    const Vec3 p = sensor_mounting.apply(sensor_point);
    return std::none_of(moving.begin(), moving.end(),
                        [&](const TrackedBox& b) { return box_contains(b, p); });
  };
  std::vector<bool> mask;
  if (sensor == ScdSensor::Lidar) {
    for (const LidarPoint& p : frame.lidar) mask.push_back(classify(p.position));
  } else {
    for (const RadarPoint& p : frame.radar) mask.push_back(classify(p.position));
  }
  return mask;
}

EgoMotionError ego_motion_error(const RigidTransform& estimate, const RigidTransform& truth) {
  EgoMotionError err;
  err.translation_error = (estimate.translation() - truth.translation()).norm();
  const Quat relative = truth.rotation().conjugate() * estimate.rotation();
  err.rotation_error =
      2.0 * std::atan2(relative.vec().norm(), std::abs(relative.w())) * 180.0 / std::numbers::pi;
  return err;
}

double smear_extent(std::span<const Vec3> points, const Vec3& direction) {
  if (points.empty()) throw Error("smear extent of an empty point set");
  const double norm = direction.norm();
  if (!(norm > 0.0)) throw Error("smear direction must be non-zero");
  const Vec3 u = direction / norm;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Vec3& p : points) {
    const double s = p.dot(u);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return hi - lo;
}

}  // namespace radaccum
