#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radaccum/types.hpp"

namespace radaccum {

enum class EgoMethod { Identity, Pose, Gicp, SmoothedGicp, Doppler, StaticObjects, GroundTruth };

std::string_view to_string(EgoMethod method);

struct EgoMotionDiagnostics {
  int iterations = 0;
  int inlier_count = 0;
  double rms_residual = 0.0;
  /// Registration objective after every accepted step (GICP only).
  std::vector<double> cost_history;
};

/// Frame-to-frame ego motion. `transform` maps points expressed in the
/// from-frame ego coordinates into the to-frame ego coordinates.
struct EgoMotionEstimate {
  FrameId from_frame = 0;
  FrameId to_frame = 0;
  RigidTransform transform;
  EgoMethod method = EgoMethod::Identity;
  EgoMotionDiagnostics diagnostics;
};

/// Motion between two ego->world poses: invert(pose_cur) * pose_prev.
EgoMotionEstimate em_from_pose(FrameId from, FrameId to, const RigidTransform& pose_prev,
                               const RigidTransform& pose_cur);

/// Least-squares motion from the centers of static labels re-identified by
/// track id across the two frames. Boxes not flagged is_static are ignored.
///
/// Throws "insufficient static objects" for fewer than three matches or a
/// collinear set of centers.
EgoMotionEstimate em_static_objects(FrameId from, FrameId to,
                                    std::span<const TrackedBox> boxes_prev,
                                    std::span<const TrackedBox> boxes_cur);

/// Moving average over a trailing window: translations by arithmetic mean,
/// rotations by quaternion averaging. Shorter windows are used at the start.
std::vector<EgoMotionEstimate> em_smooth(std::span<const EgoMotionEstimate> chain,
                                         std::size_t window = 6);

/// Composes consecutive estimates into the motion mapping `from` coordinates
/// into `to` coordinates. Walks the chain backwards (inverting) when `to`
/// precedes `from`.
RigidTransform compose_chain(std::span<const EgoMotionEstimate> estimates, FrameId from,
                             FrameId to);

}  // namespace radaccum
