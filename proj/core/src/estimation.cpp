#include "radaccum/estimation.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "radaccum/error.hpp"
#include "radaccum/io.hpp"
#include "radaccum/parallel.hpp"

namespace radaccum {

namespace {

struct NamedKind {
  EstimatorKind kind;
  std::string_view name;
};

constexpr NamedKind kNames[] = {
    {EstimatorKind::None, "none"},
    {EstimatorKind::GroundTruth, "gt"},
    {EstimatorKind::Pose, "pose"},
    {EstimatorKind::GicpLidar, "gicp-lidar"},
    {EstimatorKind::GicpRadar, "gicp-radar"},
    {EstimatorKind::SmoothedGicpLidar, "mgicp-lidar"},
    {EstimatorKind::Doppler, "doppler"},
    {EstimatorKind::StaticObjects, "static-objects"},
};

std::string sanitize(std::string message) {
  for (char& c : message) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return message.empty() ? "error" : message;
}

std::vector<Vec3> ego_positions(std::span<const LidarPoint> points, const RigidTransform& mount) {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const LidarPoint& p : points) out.push_back(mount.apply(p.position));
  return out;
}

std::vector<Vec3> ego_positions(std::span<const RadarPoint> points, const RigidTransform& mount) {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const RadarPoint& p : points) out.push_back(mount.apply(p.position));
  return out;
}

PairEstimate failed(FrameId from, FrameId to, EgoMethod method, const std::string& message) {
  PairEstimate p;
  p.estimate.from_frame = from;
  p.estimate.to_frame = to;
  p.estimate.method = method;
  p.error = sanitize(message);
  return p;
}

std::vector<PairEstimate> estimate_gicp(const Sequence& seq, const EstimationOptions& options,
                                        bool radar) {
  const GicpConfig& cfg = radar ? options.radar_gicp : options.lidar_gicp;
  cfg.validate();
  const std::size_t n = seq.frames.size();
  const RigidTransform mount = radar ? seq.radar_mounting() : seq.lidar_mounting();

  std::vector<std::optional<GicpCloud>> clouds(n);
  std::vector<std::string> cloud_errors(n);
  parallel_for(n, [&](std::size_t i) {
    const SequenceFrame& f = seq.frames[i];
    const std::vector<Vec3> pts =
        radar ? ego_positions(f.radar, mount) : ego_positions(f.lidar, mount);
    try {
      clouds[i].emplace(pts, cfg);
    } catch (const std::exception& e) {
      cloud_errors[i] = "frame " + std::to_string(f.id) + ": " + e.what();
    }
  });

  std::vector<PairEstimate> out(n > 0 ? n - 1 : 0);
  auto solve = [&](std::size_t i, const RigidTransform& init) {
    const FrameId from = seq.frames[i].id;
    const FrameId to = seq.frames[i + 1].id;
    if (!clouds[i] || !clouds[i + 1]) {
      out[i] = failed(from, to, EgoMethod::Gicp,
                      !cloud_errors[i].empty() ? cloud_errors[i] : cloud_errors[i + 1]);
      return;
    }
    try {
      out[i].estimate = em_gicp(*clouds[i], *clouds[i + 1], from, to, init, cfg);
    } catch (const std::exception& e) {
      out[i] = failed(from, to, EgoMethod::Gicp, e.what());
    }
  };

  if (options.gicp_init == GicpInit::Identity) {
    parallel_for(out.size(), [&](std::size_t i) { solve(i, RigidTransform::Identity()); });
  } else {
    // Constant-velocity prior: each pair starts from the previous result.
    RigidTransform init = RigidTransform::Identity();
    for (std::size_t i = 0; i < out.size(); ++i) {
      solve(i, init);
      init = out[i].ok() ? out[i].estimate.transform : RigidTransform::Identity();
    }
  }
  return out;
}

void smooth_segments(std::vector<PairEstimate>& pairs, std::size_t window) {
  std::size_t start = 0;
  while (start < pairs.size()) {
    if (!pairs[start].ok()) {
      pairs[start].estimate.method = EgoMethod::SmoothedGicp;
      ++start;
      continue;
    }
    std::size_t end = start;
    while (end < pairs.size() && pairs[end].ok()) ++end;
    std::vector<EgoMotionEstimate> chain;
    for (std::size_t i = start; i < end; ++i) chain.push_back(pairs[i].estimate);
    const std::vector<EgoMotionEstimate> smoothed = em_smooth(chain, window);
    for (std::size_t i = start; i < end; ++i) pairs[i].estimate = smoothed[i - start];
    start = end;
  }
}

}  // namespace

std::string_view to_string(EstimatorKind kind) {
  for (const NamedKind& n : kNames) {
    if (n.kind == kind) return n.name;
  }
  return "unknown";
}

std::vector<std::string> estimator_names() {
  std::vector<std::string> out;
  for (const NamedKind& n : kNames) out.emplace_back(n.name);
  return out;
}

EstimatorKind parse_estimator(std::string_view name) {
  for (const NamedKind& n : kNames) {
    if (n.name == name) return n.kind;
  }
  std::string valid;
  for (const NamedKind& n : kNames) valid += (valid.empty() ? "" : ", ") + std::string(n.name);
  throw Error("unknown ego-motion method '" + std::string(name) + "' (expected one of " + valid +
              ")");
}

EgoSource ego_source_for(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::None: return EgoSource::None;
    case EstimatorKind::GroundTruth: return EgoSource::GroundTruth;
    case EstimatorKind::Pose: return EgoSource::Pose;
    case EstimatorKind::GicpLidar:
    case EstimatorKind::GicpRadar: return EgoSource::Gicp;
    case EstimatorKind::SmoothedGicpLidar: return EgoSource::SmoothedGicp;
    case EstimatorKind::Doppler: return EgoSource::Doppler;
    case EstimatorKind::StaticObjects: return EgoSource::StaticObjects;
  }
  return EgoSource::None;
}

std::vector<PairEstimate> estimate_sequence(const Sequence& seq, const EstimationOptions& options) {
  const std::size_t n = seq.frames.size();
  std::vector<PairEstimate> out(n > 0 ? n - 1 : 0);

  switch (options.method) {
    case EstimatorKind::None:
      for (std::size_t i = 0; i + 1 < n; ++i) {
        out[i].estimate.from_frame = seq.frames[i].id;
        out[i].estimate.to_frame = seq.frames[i + 1].id;
        out[i].estimate.method = EgoMethod::Identity;
      }
      return out;

    case EstimatorKind::GroundTruth:
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const FrameId from = seq.frames[i].id;
        const FrameId to = seq.frames[i + 1].id;
        out[i] = failed(from, to, EgoMethod::GroundTruth,
                        "no ground truth for " + std::to_string(from) + "->" + std::to_string(to));
        if (!seq.ground_truth) continue;
        for (const GroundTruthEgoMotion& m : seq.ground_truth->ego_motion) {
          if (m.from != from || m.to != to) continue;
          try {
            out[i] = PairEstimate{};
            out[i].estimate.from_frame = from;
            out[i].estimate.to_frame = to;
            out[i].estimate.transform = RigidTransform::FromMatrix(m.transform);
            out[i].estimate.method = EgoMethod::GroundTruth;
          } catch (const std::exception& e) {
            out[i] = failed(from, to, EgoMethod::GroundTruth, e.what());
          }
          break;
        }
      }
      return out;

    case EstimatorKind::Pose:
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const FrameId from = seq.frames[i].id;
        const FrameId to = seq.frames[i + 1].id;
        try {
          const std::optional<RigidTransform> prev = seq.ego_pose(i);
          const std::optional<RigidTransform> cur = seq.ego_pose(i + 1);
          if (!prev || !cur) {
            throw Error("missing pose for frame " + std::to_string(prev ? to : from));
          }
          out[i].estimate = em_from_pose(from, to, *prev, *cur);
        } catch (const std::exception& e) {
          out[i] = failed(from, to, EgoMethod::Pose, e.what());
        }
      }
      return out;

    case EstimatorKind::StaticObjects:
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const FrameId from = seq.frames[i].id;
        const FrameId to = seq.frames[i + 1].id;
        try {
          out[i].estimate =
              em_static_objects(from, to, seq.frames[i].labels, seq.frames[i + 1].labels);
        } catch (const std::exception& e) {
          out[i] = failed(from, to, EgoMethod::StaticObjects, e.what());
        }
      }
      return out;

    case EstimatorKind::Doppler: {
      DopplerConfig cfg = options.doppler;
      cfg.sensor_mounting = seq.radar_mounting();
      cfg.validate();
      parallel_for(out.size(), [&](std::size_t i) {
        const SequenceFrame& prev = seq.frames[i];
        const SequenceFrame& cur = seq.frames[i + 1];
        try {
          DopplerResult r =
              em_doppler(cur.radar, prev.id, cur.id, cur.timestamp - prev.timestamp, cfg);
          out[i].estimate = std::move(r.estimate);
        } catch (const std::exception& e) {
          out[i] = failed(prev.id, cur.id, EgoMethod::Doppler, e.what());
        }
      });
      return out;
    }

    case EstimatorKind::GicpLidar: return estimate_gicp(seq, options, false);
    case EstimatorKind::GicpRadar: return estimate_gicp(seq, options, true);
    case EstimatorKind::SmoothedGicpLidar: {
      if (options.smoothing_window == 0) throw Error("smoothing window must be positive");
      out = estimate_gicp(seq, options, false);
      smooth_segments(out, options.smoothing_window);
      return out;
    }
  }
  return out;
}

std::vector<EgoMotionEstimate> successful_estimates(std::span<const PairEstimate> pairs) {
  std::vector<EgoMotionEstimate> out;
  for (const PairEstimate& p : pairs) {
    if (p.ok()) out.push_back(p.estimate);
  }
  return out;
}

std::string estimates_to_csv(std::span<const PairEstimate> pairs, std::string_view method_name) {
  std::string out = "from_id,to_id,method,tx,ty,tz,qw,qx,qy,qz,inliers,rms,status\n";
  for (const PairEstimate& p : pairs) {
    const EgoMotionEstimate& e = p.estimate;
    const Vec3& t = e.transform.translation();
    const Quat& q = e.transform.rotation();
    out += std::to_string(e.from_frame) + ',' + std::to_string(e.to_frame) + ',' +
           std::string(method_name);
    for (double v : {t.x(), t.y(), t.z(), q.w(), q.x(), q.y(), q.z()}) {
      out += ',' + format_double(v);
    }
    out += ',' + std::to_string(e.diagnostics.inlier_count) + ',' +
           format_double(e.diagnostics.rms_residual) + ',' + (p.ok() ? "ok" : sanitize(p.error)) + '\n';
  }
  return out;
}

std::vector<CsvEstimate> estimates_from_csv(std::string_view text) {
  std::vector<CsvEstimate> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("from_id,", 0) == 0) {
      header = true;
      continue;
    }
    if (!header) throw Error("estimates line " + std::to_string(line_no) + ": missing header");

    std::vector<std::string> fields;
    std::size_t pos = 0;
    for (int i = 0; i < 12; ++i) {
      const std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) break;
      fields.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    fields.push_back(line.substr(pos));
    const std::string where = "estimates line " + std::to_string(line_no);
    if (fields.size() != 13) throw Error(where + ": expected 13 columns");

    CsvEstimate row;
    row.method = fields[2];
    try {
      auto parse_id = [&](const std::string& s) {
        const double v = parse_double(s);
        if (v < 0 || v != static_cast<double>(static_cast<FrameId>(v))) {
          throw Error("invalid frame id '" + s + "'");
        }
        return static_cast<FrameId>(v);
      };
      EgoMotionEstimate& e = row.pair.estimate;
      e.from_frame = parse_id(fields[0]);
      e.to_frame = parse_id(fields[1]);
      double v[7];
      for (int i = 0; i < 7; ++i) v[i] = parse_double(fields[3 + i]);
      const Quat q(v[3], v[4], v[5], v[6]);
      if (std::abs(q.norm() - 1.0) > 1e-6) throw Error("quaternion is not unit length");
      e.transform = RigidTransform(q, Vec3(v[0], v[1], v[2]));
      e.diagnostics.inlier_count = static_cast<int>(parse_double(fields[10]));
      e.diagnostics.rms_residual = parse_double(fields[11]);
    } catch (const Error& err) {
      throw Error(where + ": " + err.what());
    }
    if (fields[12] != "ok") row.pair.error = fields[12].empty() ? "error" : fields[12];
    out.push_back(std::move(row));
  }
  if (!header) throw Error("estimates: missing header");
  return out;
}

}  // namespace radaccum
