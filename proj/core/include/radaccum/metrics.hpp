#pragma once

#include <optional>
#include <span>
#include <vector>

#include "radaccum/box.hpp"
#include "radaccum/spatial_index.hpp"
#include "radaccum/types.hpp"

namespace radaccum {

/// Mean nearest-neighbor distance from each query point to `index`.
double mean_nearest_distance(std::span<const Vec3> queries, const SpatialIndex& index);

/// Symmetric Chamfer distance: the average of the two directed mean
/// nearest-neighbor distances. Throws on an empty set.
double chamfer_symmetric(std::span<const Vec3> a, std::span<const Vec3> b);

enum class ScdSensor { Lidar, Radar };

/// sCD between frame k and frame k-1 moved by `prev_to_cur` (ego coordinates).
/// Optional masks (true = static, one entry per point of the respective
/// frame) drop moving points from each side.
double scd_of_correction(const Sequence& seq, std::size_t frame_index,
                         const RigidTransform& prev_to_cur,
                         const std::vector<bool>* static_prev = nullptr,
                         const std::vector<bool>* static_cur = nullptr,
                         ScdSensor sensor = ScdSensor::Lidar);

/// Static mask for one frame: false for points inside any dilated box that is
/// not flagged is_static. Boxes are in the ego frame.
std::vector<bool> static_mask_from_labels(const SequenceFrame& frame,
                                          const RigidTransform& sensor_mounting,
                                          ScdSensor sensor = ScdSensor::Lidar,
                                          double margin = kDefaultBoxMargin);

struct EgoMotionError {
  double translation_error = 0.0;  // meters
  double rotation_error = 0.0;     // degrees
};

/// |t_est - t_gt| and the angle of R_gt^T R_est.
EgoMotionError ego_motion_error(const RigidTransform& estimate, const RigidTransform& truth);

/// Extent of the points projected onto `direction` (normalized internally).
double smear_extent(std::span<const Vec3> points, const Vec3& direction);

}  // namespace radaccum
