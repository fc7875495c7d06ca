#include "radaccum/box.hpp"

#include <cmath>

#include "radaccum/error.hpp"

namespace radaccum {

TrackedBox dilate_box(const TrackedBox& box, double margin) {
  if (!(margin >= 0.0)) throw Error("box margin must be non-negative");
  TrackedBox out = box;
  out.dimensions = box.dimensions + Vec3::Constant(2.0 * margin);
  return out;
}

bool box_contains(const TrackedBox& box, const Vec3& point) {
  const Vec3 d = point - box.center;
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double local_x = c * d.x() + s * d.y();
  const double local_y = -s * d.x() + c * d.y();
  return std::abs(local_x) <= 0.5 * box.dimensions.x() &&
         std::abs(local_y) <= 0.5 * box.dimensions.y() &&
         std::abs(d.z()) <= 0.5 * box.dimensions.z();
}

TrackedBox transform_box(const RigidTransform& transform, const TrackedBox& box) {
  TrackedBox out = box;
  out.center = transform.apply(box.center);
  const Vec3 heading = transform.rotate(Vec3(std::cos(box.yaw), std::sin(box.yaw), 0.0));
  out.yaw = std::atan2(heading.y(), heading.x());
  return out;
}

namespace {

template <typename Point, typename Position>
std::vector<std::size_t> collect(std::span<const Point> points, const TrackedBox& box,
                                 Position position) {
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (box_contains(box, position(points[i]))) members.push_back(i);
  }
  return members;
}

}  // namespace

std::vector<std::size_t> points_in_box(std::span<const Vec3> points, const TrackedBox& box) {
  return collect(points, box, [](const Vec3& p) -> const Vec3& { return p; });
}

std::vector<std::size_t> points_in_box(std::span<const RadarPoint> points, const TrackedBox& box) {
  return collect(points, box, [](const RadarPoint& p) -> const Vec3& { return p.position; });
}

std::vector<std::size_t> points_in_box(std::span<const LidarPoint> points, const TrackedBox& box) {
  return collect(points, box, [](const LidarPoint& p) -> const Vec3& { return p.position; });
}

}  // namespace radaccum
