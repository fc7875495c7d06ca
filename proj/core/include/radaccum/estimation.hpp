#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radaccum/accumulate.hpp"
#include "radaccum/doppler.hpp"
#include "radaccum/gicp.hpp"

namespace radaccum {

/// Ego-motion sources selectable per sequence. The string names are the ones
/// used on the command line and in estimate CSV files.
enum class EstimatorKind {
  None,           // identity for every pair
  GroundTruth,    // simulator gt/ego_motion.txt
  Pose,
  GicpLidar,
  GicpRadar,
  SmoothedGicpLidar,
  Doppler,
  StaticObjects,
};

std::string_view to_string(EstimatorKind kind);
/// Throws radaccum::Error listing the valid names.
EstimatorKind parse_estimator(std::string_view name);
std::vector<std::string> estimator_names();
EgoSource ego_source_for(EstimatorKind kind);

enum class GicpInit { Identity, Previous };

struct EstimationOptions {
  EstimatorKind method = EstimatorKind::Pose;
  GicpInit gicp_init = GicpInit::Identity;
  GicpConfig lidar_gicp = GicpConfig::Lidar();
  GicpConfig radar_gicp = GicpConfig::Radar();
  /// The sensor mounting is taken from the sequence.
  DopplerConfig doppler;
  std::size_t smoothing_window = 6;
};

/// One consecutive frame pair. A failed pair keeps its ids and carries the
/// error message; its transform is the identity.
struct PairEstimate {
  EgoMotionEstimate estimate;
  std::string error;

  bool ok() const { return error.empty(); }
};

/// Estimates every consecutive pair of `seq`. Per-pair failures are recorded,
/// never thrown; configuration errors throw.
std::vector<PairEstimate> estimate_sequence(const Sequence& seq, const EstimationOptions& options);

std::vector<EgoMotionEstimate> successful_estimates(std::span<const PairEstimate> pairs);

/// Header: from_id,to_id,method,tx,ty,tz,qw,qx,qy,qz,inliers,rms,status
/// `status` is "ok" or the error message of a failed pair.
std::string estimates_to_csv(std::span<const PairEstimate> pairs, std::string_view method_name);

struct CsvEstimate {
  std::string method;
  PairEstimate pair;
};

/// Parses estimates_to_csv output (several methods may be concatenated under
/// one header). Throws radaccum::Error naming the offending line.
std::vector<CsvEstimate> estimates_from_csv(std::string_view text);

}  // namespace radaccum
