#include "radaccum/accumulate.hpp"

#include <limits>
#include <string>

#include "radaccum/error.hpp"
#include "radaccum/io.hpp"

namespace radaccum {

void AccumulationConfig::validate() const {
  if (horizon < 1) throw Error("accumulation horizon must be at least 1");
  if (horizon > std::numeric_limits<std::uint8_t>::max() + 1) {
    throw Error("accumulation horizon exceeds the 8-bit age encoding");
  }
  if (!(box_margin >= 0.0)) throw Error("box margin must be non-negative");
  if (!(segmentation_threshold > 0.0)) throw Error("segmentation threshold must be positive");
  if (ego_method == EgoSource::None && dynamic_method != DynamicCorrection::None) {
    throw Error("dynamic correction requires an ego-motion source");
  }
}

std::vector<Vec3> AccumulatedCloud::positions() const {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const AccumulatedPoint& p : points) out.push_back(p.point.position);
  return out;
}

std::vector<RadarPoint> AccumulatedCloud::radar_points() const {
  std::vector<RadarPoint> out;
  out.reserve(points.size());
  for (const AccumulatedPoint& p : points) out.push_back(p.point);
  return out;
}

std::vector<std::uint8_t> AccumulatedCloud::ages() const {
  std::vector<std::uint8_t> out;
  out.reserve(points.size());
  for (const AccumulatedPoint& p : points) out.push_back(p.age);
  return out;
}

namespace {

const EgoMotionEstimate* find_step(std::span<const EgoMotionEstimate> estimates, FrameId from,
                                   FrameId to) {
  for (const EgoMotionEstimate& e : estimates) {
    if (e.from_frame == from && e.to_frame == to) return &e;
  }
  return nullptr;
}

}  // namespace

Vec3 sensor_velocity_at(const Sequence& seq, std::size_t index,
                        std::span<const EgoMotionEstimate> estimates,
                        const RigidTransform& mounting) {
  if (index > 0) {
    const SequenceFrame& prev = seq.frames[index - 1];
    const SequenceFrame& cur = seq.frames[index];
    if (const auto* e = find_step(estimates, prev.id, cur.id)) {
      return sensor_velocity_from_ego(e->transform, cur.timestamp - prev.timestamp, mounting);
    }
  }
  if (index + 1 < seq.frames.size()) {
    const SequenceFrame& cur = seq.frames[index];
    const SequenceFrame& next = seq.frames[index + 1];
    if (const auto* e = find_step(estimates, cur.id, next.id)) {
      return sensor_velocity_from_ego(e->transform, next.timestamp - cur.timestamp, mounting);
    }
  }
  throw Error("no ego-motion estimate adjacent to frame " + std::to_string(seq.frames[index].id) +
              " for radial velocity compensation");
}

AccumulatedCloud accumulate(const Sequence& seq, std::size_t frame_index,
                            const AccumulationConfig& cfg,
                            std::span<const EgoMotionEstimate> ego_estimates) {
  cfg.validate();
  if (frame_index >= seq.frames.size()) {
    throw Error("frame index " + std::to_string(frame_index) + " is outside the sequence");
  }
  const auto horizon = static_cast<std::size_t>(cfg.horizon);
  if (frame_index + 1 < horizon) {
    throw Error("horizon " + std::to_string(horizon) + " at frame " +
                std::to_string(seq.frames[frame_index].id) + " needs " +
                std::to_string(horizon - 1 - frame_index) +
                " frame(s) before the start of the sequence");
  }

  const SequenceFrame& current = seq.frames[frame_index];
  AccumulatedCloud cloud;
  cloud.frame_id = current.id;

  // Every consecutive step inside the horizon must be covered.
  if (cfg.ego_method != EgoSource::None) {
    std::string missing;
    for (std::size_t i = frame_index + 1 - horizon; i < frame_index; ++i) {
      if (!find_step(ego_estimates, seq.frames[i].id, seq.frames[i + 1].id)) {
        missing += (missing.empty() ? "" : ", ") + std::to_string(seq.frames[i].id) + "->" +
                   std::to_string(seq.frames[i + 1].id);
      }
    }
    if (!missing.empty()) throw Error("missing ego-motion estimates: " + missing);
  }

  const RigidTransform mounting = seq.radar_mounting();
  const RigidTransform mounting_inv = mounting.inverse();

  for (std::size_t age = 0; age < horizon; ++age) {
    const std::size_t index = frame_index - age;
    const SequenceFrame& source = seq.frames[index];
    const auto age_tag = static_cast<std::uint8_t>(age);

    if (age == 0 || cfg.ego_method == EgoSource::None) {
      for (const RadarPoint& p : source.radar) cloud.points.push_back({p, age_tag, source.id});
      continue;
    }

    const RigidTransform chain = compose_chain(ego_estimates, source.id, current.id);
    std::vector<Vec3> positions;
    positions.reserve(source.radar.size());

    if (cfg.dynamic_method == DynamicCorrection::RadialVelocity) {
      const Vec3 v_sensor = sensor_velocity_at(seq, index, ego_estimates, mounting);
      const auto labels =
          segment_static_dynamic(source.radar, v_sensor, cfg.segmentation_threshold);
      const double elapsed = current.timestamp - source.timestamp;
      for (std::size_t i = 0; i < source.radar.size(); ++i) {
        Vec3 p = source.radar[i].position;
        if (labels[i].tag == MotionTag::Dynamic && p.norm() > 0.0) {
          p = dyn_vrr_correct(p, compensated_vrr(source.radar[i], v_sensor), elapsed);
        }
        positions.push_back(chain.apply(mounting.apply(p)));
      }
    } else {
      for (const RadarPoint& p : source.radar) {
        positions.push_back(chain.apply(mounting.apply(p.position)));
      }
      if (cfg.dynamic_method == DynamicCorrection::GroundTruth) {
        positions = dyn_gt_correct(positions, source.labels, current.labels, chain, cfg.box_margin);
      }
    }

    for (std::size_t i = 0; i < source.radar.size(); ++i) {
      RadarPoint p = source.radar[i];
      p.position = mounting_inv.apply(positions[i]);
      cloud.points.push_back({p, age_tag, source.id});
    }
  }
  return cloud;
}

void write_accumulated(const AccumulatedCloud& cloud, const std::filesystem::path& directory) {
  const std::vector<RadarPoint> points = cloud.radar_points();
  write_radar_bin(directory / "radar.bin", points);
  const std::vector<std::uint8_t> ages = cloud.ages();
  write_mask_bin(directory / "age.bin", ages);
}

}  // namespace radaccum
