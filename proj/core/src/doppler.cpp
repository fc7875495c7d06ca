#include "radaccum/doppler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <tuple>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "radaccum/error.hpp"

namespace radaccum {

namespace {

// Smallest-to-largest singular value ratio below which the line-of-sight
// directions are treated as spanning less than 3D.
constexpr double kRankThreshold = 1e-9;

Vec3 line_of_sight(const Vec3& position) {
  const double r = position.norm();
  return r > 0.0 ? Vec3(position / r) : Vec3::Zero();
}

double residual(const RadarPoint& p, const Vec3& sensor_velocity) {
  return p.v_rr - predicted_static_vrr(p.position, sensor_velocity);
}

// Fixed iteration order makes the refit independent of the caller's point order.
bool canonical_less(const RadarPoint& a, const RadarPoint& b) {
  return std::tie(a.position.x(), a.position.y(), a.position.z(), a.v_rr) <
         std::tie(b.position.x(), b.position.y(), b.position.z(), b.v_rr);
}

std::vector<bool> consensus(std::span<const RadarPoint> points, const Vec3& v, double threshold,
                            int& count) {
  std::vector<bool> mask(points.size(), false);
  count = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (std::abs(residual(points[i], v)) < threshold) {
      mask[i] = true;
      ++count;
    }
  }
  return mask;
}

Vec3 refit(std::span<const RadarPoint> points, const std::vector<bool>& mask) {
  std::vector<RadarPoint> selected;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (mask[i]) selected.push_back(points[i]);
  }
  std::sort(selected.begin(), selected.end(), canonical_less);
  return fit_sensor_velocity(selected);
}

}  // namespace

void DopplerConfig::validate() const {
  if (ransac_iterations < 1) throw Error("RANSAC needs at least one iteration");
  if (!(inlier_threshold > 0.0)) throw Error("Doppler inlier threshold must be positive");
  if (min_inliers < 3) throw Error("Doppler min_inliers must be at least 3");
}

double predicted_static_vrr(const Vec3& position, const Vec3& sensor_velocity) {
  return -line_of_sight(position).dot(sensor_velocity);
}

Vec3 fit_sensor_velocity(std::span<const RadarPoint> points) {
  if (points.size() < 3) throw Error("velocity under-determined: fewer than 3 detections");
  Eigen::MatrixXd a(points.size(), 3);
  Eigen::VectorXd b(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    a.row(static_cast<Eigen::Index>(i)) = line_of_sight(points[i].position).transpose();
    b(static_cast<Eigen::Index>(i)) = -points[i].v_rr;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(2) < kRankThreshold * sv(0)) {
    throw Error("velocity under-determined: line-of-sight directions do not span 3D");
  }
  return svd.solve(b);
}

DopplerResult em_doppler(std::span<const RadarPoint> points, FrameId from, FrameId to, double dt,
                         const DopplerConfig& cfg) {
  cfg.validate();
  if (!(dt > 0.0)) throw Error("Doppler ego motion needs a positive time step");
  if (points.size() < static_cast<std::size_t>(cfg.min_inliers)) {
    throw Error("insufficient static points: frame has " + std::to_string(points.size()) +
                " detections");
  }

  std::mt19937_64 rng(cfg.seed);
  const std::size_t n = points.size();
  int best_count = -1;
  Vec3 best_velocity = Vec3::Zero();
  for (int it = 0; it < cfg.ransac_iterations; ++it) {
    std::array<std::size_t, 3> idx{};
    idx[0] = rng() % n;
    do idx[1] = rng() % n; while (idx[1] == idx[0]);
    do idx[2] = rng() % n; while (idx[2] == idx[0] || idx[2] == idx[1]);

    Mat3 a;
    Vec3 b;
    for (int r = 0; r < 3; ++r) {
      a.row(r) = line_of_sight(points[idx[r]].position).transpose();
      b(r) = -points[idx[r]].v_rr;
    }
    const Eigen::FullPivLU<Mat3> lu(a);
    if (lu.rank() < 3) continue;
    const Vec3 v = lu.solve(b);
    int count = 0;
    (void)consensus(points, v, cfg.inlier_threshold, count);
    if (count > best_count) {
      best_count = count;
      best_velocity = v;
    }
  }
  if (best_count < cfg.min_inliers) {
    throw Error("insufficient static points: best consensus has " +
                std::to_string(std::max(best_count, 0)) + " detections");
  }

  // Refit on the consensus set, then once more on the refined consensus.
  int count = 0;
  std::vector<bool> mask = consensus(points, best_velocity, cfg.inlier_threshold, count);
  Vec3 velocity = refit(points, mask);
  mask = consensus(points, velocity, cfg.inlier_threshold, count);
  if (count < cfg.min_inliers) {
    throw Error("insufficient static points: " + std::to_string(count) + " after refit");
  }
  velocity = refit(points, mask);
  mask = consensus(points, velocity, cfg.inlier_threshold, count);

  DopplerResult result;
  result.sensor_velocity = velocity;
  result.inliers = mask;

  const Mat3 mount_r = cfg.sensor_mounting.rotation_matrix();
  const Vec3 sensor_in_ego = mount_r * velocity;

  EgoMotionEstimate& est = result.estimate;
  est.from_frame = from;
  est.to_frame = to;
  est.method = EgoMethod::Doppler;
  est.diagnostics.inlier_count = count;
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i]) sq += std::pow(residual(points[i], velocity), 2);
  }
  est.diagnostics.rms_residual = count > 0 ? std::sqrt(sq / count) : 0.0;
  est.diagnostics.iterations = cfg.ransac_iterations;

  if (cfg.motion_model == DopplerMotionModel::TranslationOnly) {
    result.ego_velocity = sensor_in_ego;
    // The ego advanced by v*dt, so stationary points move by -v*dt in ego coordinates.
    est.transform = RigidTransform::Translation(-sensor_in_ego * dt);
  } else {
    // Single-track model: the ego origin moves along its own x axis, so the
    // sensor's lateral velocity comes only from yaw rate times lever arm.
    const Vec3& lever = cfg.sensor_mounting.translation();
    if (std::abs(lever.x()) < 1e-6) {
      throw Error("velocity under-determined: Ackermann model needs a longitudinal lever arm");
    }
    const double yaw_rate = sensor_in_ego.y() / lever.x();
    const double forward = sensor_in_ego.x() + yaw_rate * lever.y();
    result.yaw_rate = yaw_rate;
    result.ego_velocity = Vec3(forward, 0.0, 0.0);
    Twist body;
    body.linear = Vec3(forward * dt, 0.0, 0.0);
    body.angular = Vec3(0.0, 0.0, yaw_rate * dt);
    est.transform = exp_se3(body).inverse();
  }
  return result;
}

}  // namespace radaccum
