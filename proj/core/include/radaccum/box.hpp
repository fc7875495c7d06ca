#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "radaccum/types.hpp"

namespace radaccum {

/// Label margin applied to every box before point membership tests.
inline constexpr double kDefaultBoxMargin = 0.2;

/// Grows length, width and height by 2 * margin; center and yaw unchanged.
TrackedBox dilate_box(const TrackedBox& box, double margin);

/// Boundary-inclusive containment in box coordinates.
bool box_contains(const TrackedBox& box, const Vec3& point);

/// Re-expresses a box under a rigid frame change (center moved, heading rotated).
TrackedBox transform_box(const RigidTransform& transform, const TrackedBox& box);

std::vector<std::size_t> points_in_box(std::span<const Vec3> points, const TrackedBox& box);
std::vector<std::size_t> points_in_box(std::span<const RadarPoint> points, const TrackedBox& box);
std::vector<std::size_t> points_in_box(std::span<const LidarPoint> points, const TrackedBox& box);

}  // namespace radaccum
