#include "radaccum/ego_motion.hpp"

#include <cmath>
#include <map>

#include "radaccum/alignment.hpp"
#include "radaccum/error.hpp"
#include "radaccum/quaternion_average.hpp"

namespace radaccum {

std::string_view to_string(EgoMethod method) {
  switch (method) {
    case EgoMethod::Identity: return "identity";
    case EgoMethod::Pose: return "pose";
    case EgoMethod::Gicp: return "gicp";
    case EgoMethod::SmoothedGicp: return "smoothed-gicp";
    case EgoMethod::Doppler: return "doppler";
    case EgoMethod::StaticObjects: return "static-objects";
    case EgoMethod::GroundTruth: return "ground-truth";
  }
  return "unknown";
}

EgoMotionEstimate em_from_pose(FrameId from, FrameId to, const RigidTransform& pose_prev,
                               const RigidTransform& pose_cur) {
  EgoMotionEstimate est;
  est.from_frame = from;
  est.to_frame = to;
  est.transform = pose_cur.inverse() * pose_prev;
  est.method = EgoMethod::Pose;
  return est;
}

EgoMotionEstimate em_static_objects(FrameId from, FrameId to,
                                    std::span<const TrackedBox> boxes_prev,
                                    std::span<const TrackedBox> boxes_cur) {
  std::map<int, Vec3> current;
  for (const TrackedBox& b : boxes_cur) {
    if (b.is_static) current.emplace(b.track_id, b.center);
  }
  std::map<int, Vec3> previous;
  for (const TrackedBox& b : boxes_prev) {
    if (b.is_static && current.contains(b.track_id)) previous.emplace(b.track_id, b.center);
  }

  std::vector<Vec3> src;
  std::vector<Vec3> dst;
  for (const auto& [track, center] : previous) {
    src.push_back(center);
    dst.push_back(current.at(track));
  }
  if (src.size() < 3) {
    throw Error("insufficient static objects: " + std::to_string(src.size()) +
                " matched, 3 required");
  }

  EgoMotionEstimate est;
  est.from_frame = from;
  est.to_frame = to;
  est.method = EgoMethod::StaticObjects;
  try {
    est.transform = align_correspondences(src, dst);
  } catch (const Error& e) {
    throw Error(std::string("insufficient static objects: ") + e.what());
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    sq += (est.transform.apply(src[i]) - dst[i]).squaredNorm();
  }
  est.diagnostics.inlier_count = static_cast<int>(src.size());
  est.diagnostics.rms_residual = std::sqrt(sq / static_cast<double>(src.size()));
  return est;
}

std::vector<EgoMotionEstimate> em_smooth(std::span<const EgoMotionEstimate> chain,
                                         std::size_t window) {
  if (window == 0) throw Error("smoothing window must be at least 1");
  for (std::size_t i = 1; i < chain.size(); ++i) {
    if (chain[i - 1].to_frame != chain[i].from_frame) {
      throw Error("ego-motion chain is not consecutive at frame " +
                  std::to_string(chain[i - 1].to_frame));
    }
  }

  std::vector<EgoMotionEstimate> out;
  out.reserve(chain.size());
  std::vector<Quat> rotations;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const std::size_t first = i + 1 >= window ? i + 1 - window : 0;
    Vec3 translation = Vec3::Zero();
    rotations.clear();
    for (std::size_t j = first; j <= i; ++j) {
      translation += chain[j].transform.translation();
      rotations.push_back(chain[j].transform.rotation());
    }
    translation /= static_cast<double>(i - first + 1);

    EgoMotionEstimate smoothed = chain[i];
    smoothed.transform = RigidTransform(average_quaternions(rotations), translation);
    smoothed.method = EgoMethod::SmoothedGicp;
    out.push_back(std::move(smoothed));
  }
  return out;
}

RigidTransform compose_chain(std::span<const EgoMotionEstimate> estimates, FrameId from,
                             FrameId to) {
  if (from == to) return RigidTransform::Identity();

  std::map<FrameId, const EgoMotionEstimate*> by_start;
  for (const EgoMotionEstimate& e : estimates) by_start.emplace(e.from_frame, &e);

  auto walk = [&](FrameId a, FrameId b) -> std::optional<RigidTransform> {
    RigidTransform total;
    FrameId cursor = a;
    for (std::size_t steps = 0; steps <= estimates.size(); ++steps) {
      const auto it = by_start.find(cursor);
      if (it == by_start.end()) return std::nullopt;
      total = it->second->transform * total;
      cursor = it->second->to_frame;
      if (cursor == b) return total;
    }
    return std::nullopt;
  };

  if (auto forward = walk(from, to)) return *forward;
  if (auto backward = walk(to, from)) return backward->inverse();
  throw Error("gap in ego-motion chain between frames " + std::to_string(from) + " and " +
              std::to_string(to));
}

}  // namespace radaccum
