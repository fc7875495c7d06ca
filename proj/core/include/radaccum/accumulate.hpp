#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "radaccum/dynamics.hpp"
#include "radaccum/ego_motion.hpp"
#include "radaccum/types.hpp"

namespace radaccum {

enum class EgoSource { None, Pose, Gicp, SmoothedGicp, Doppler, StaticObjects, GroundTruth };
enum class DynamicCorrection { None, GroundTruth, RadialVelocity };

struct AccumulationConfig {
  int horizon = 5;  // frames, >= 1
  EgoSource ego_method = EgoSource::Pose;
  DynamicCorrection dynamic_method = DynamicCorrection::None;
  double box_margin = kDefaultBoxMargin;
  double segmentation_threshold = kDefaultSegmentationThreshold;

  void validate() const;
};

struct AccumulatedPoint {
  RadarPoint point;         // position in the current radar frame; rcs and v_rr as measured
  std::uint8_t age = 0;     // frame offset j: the point was measured at frame k - j
  FrameId source_frame = 0;
};

/// Radar points of the last `horizon` frames expressed in the current radar
/// sensor frame. Age-0 points are copied verbatim from the current frame.
struct AccumulatedCloud {
  FrameId frame_id = 0;
  std::vector<AccumulatedPoint> points;

  std::vector<Vec3> positions() const;
  std::vector<RadarPoint> radar_points() const;
  std::vector<std::uint8_t> ages() const;
};

/// Radar sensor velocity (sensor frame) at the measurement time of frame
/// `index`: from the step ending there, or from the step leaving it for the
/// first frame of a sequence. Throws when neither step is available.
Vec3 sensor_velocity_at(const Sequence& seq, std::size_t index,
                        std::span<const EgoMotionEstimate> estimates,
                        const RigidTransform& mounting);

/// Builds the accumulated cloud for the frame at `frame_index`.
///
/// Past frames are moved with compose_chain over `ego_estimates` (ignored when
/// ego_method is None, which concatenates raw sensor-frame points). The
/// dynamic correction is applied before the ego transform: a radial shift for
/// RadialVelocity (gated by segmentation), a label-derived object motion for
/// GroundTruth (gated by box membership).
///
/// Throws listing the missing frame ids / estimate gaps.
AccumulatedCloud accumulate(const Sequence& seq, std::size_t frame_index,
                            const AccumulationConfig& cfg,
                            std::span<const EgoMotionEstimate> ego_estimates);

/// radar.bin records plus age.bin (one uint8 per point) under `directory`.
void write_accumulated(const AccumulatedCloud& cloud, const std::filesystem::path& directory);

}  // namespace radaccum
