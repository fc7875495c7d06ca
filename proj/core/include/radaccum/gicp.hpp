#pragma once

#include <span>
#include <vector>

#include "radaccum/ego_motion.hpp"
#include "radaccum/spatial_index.hpp"

namespace radaccum {

struct GicpConfig {
  int neighbors_for_covariance = 20;
  double covariance_regularization = 1e-3;  // smallest eigenvalue of the local surface model
  double max_correspondence_distance = 1.0;  // meters
  int max_iterations = 50;
  double translation_tolerance = 1e-4;  // meters
  double rotation_tolerance = 1e-4;     // radians
  double voxel_downsample_size = 0.0;   // meters, 0 disables
  /// Per-point Mahalanobis cost cap. Matches above it and source points
  /// without a target neighbor in range contribute exactly the cap.
  double max_mahalanobis = 9.0;

  static GicpConfig Lidar() {
    GicpConfig cfg;
    cfg.voxel_downsample_size = 0.1;
    return cfg;
  }
  static GicpConfig Radar() { return {}; }

  void validate() const;
};

/// Voxel-grid centroids, ordered by voxel key so the result is independent of
/// input order. size <= 0 returns the input unchanged.
std::vector<Vec3> voxel_downsample(std::span<const Vec3> points, double size);

/// A cloud prepared for registration: downsampled points, their k-d tree and
/// per-point plane-like covariances. Building it is the expensive part, so a
/// frame that takes part in two registrations is prepared once.
class GicpCloud {
 public:
  GicpCloud(std::span<const Vec3> points, const GicpConfig& cfg);

  const SpatialIndex& index() const { return index_; }
  const std::vector<Vec3>& points() const { return index_.points(); }
  const std::vector<Mat3>& covariances() const { return covariances_; }
  std::size_t size() const { return index_.size(); }

 private:
  SpatialIndex index_;
  std::vector<Mat3> covariances_;
};

/// Plane-to-plane generalized ICP. Returns the transform mapping source into
/// target coordinates; diagnostics hold the iteration count, the objective
/// after each accepted step and its final RMS.
///
/// Throws on too few points and "registration diverged" when no source point
/// has a target neighbor within max_correspondence_distance.
EgoMotionEstimate em_gicp(const GicpCloud& source, const GicpCloud& target, FrameId from,
                          FrameId to, const RigidTransform& init, const GicpConfig& cfg);

EgoMotionEstimate em_gicp(std::span<const Vec3> source, std::span<const Vec3> target,
                          FrameId from, FrameId to, const RigidTransform& init,
                          const GicpConfig& cfg);

}  // namespace radaccum
