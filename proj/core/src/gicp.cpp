#include "radaccum/gicp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <tuple>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "radaccum/error.hpp"

namespace radaccum {

void GicpConfig::validate() const {
  if (neighbors_for_covariance < 3) throw Error("GICP needs at least 3 covariance neighbors");
  if (!(covariance_regularization > 0.0)) throw Error("GICP covariance regularization must be positive");
  if (!(max_correspondence_distance > 0.0)) throw Error("GICP correspondence distance must be positive");
  if (max_iterations < 1) throw Error("GICP max_iterations must be positive");
  if (!(translation_tolerance > 0.0) || !(rotation_tolerance > 0.0)) {
    throw Error("GICP tolerances must be positive");
  }
  if (!(voxel_downsample_size >= 0.0)) throw Error("GICP voxel size must be non-negative");
  if (!(max_mahalanobis > 0.0)) throw Error("GICP max_mahalanobis must be positive");
}

std::vector<Vec3> voxel_downsample(std::span<const Vec3> points, double size) {
  if (size <= 0.0) return {points.begin(), points.end()};
  using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t>;
  std::map<Key, std::pair<Vec3, std::size_t>> cells;
  for (const Vec3& p : points) {
    const Key key{static_cast<std::int64_t>(std::floor(p.x() / size)),
                  static_cast<std::int64_t>(std::floor(p.y() / size)),
                  static_cast<std::int64_t>(std::floor(p.z() / size))};
    auto [it, inserted] = cells.try_emplace(key, Vec3::Zero(), 0);
    it->second.first += p;
    ++it->second.second;
  }
  std::vector<Vec3> out;
  out.reserve(cells.size());
  for (const auto& [key, cell] : cells) out.push_back(cell.first / static_cast<double>(cell.second));
  return out;
}

GicpCloud::GicpCloud(std::span<const Vec3> points, const GicpConfig& cfg) {
  cfg.validate();
  const auto k = static_cast<std::size_t>(cfg.neighbors_for_covariance);
  if (points.size() < k) {
    throw Error("too few points for GICP: " + std::to_string(points.size()) + " < " +
                std::to_string(k));
  }
  index_ = SpatialIndex(voxel_downsample(points, cfg.voxel_downsample_size));
  if (index_.size() < k) {
    throw Error("too few points for GICP after downsampling: " + std::to_string(index_.size()));
  }

  const Vec3 model(cfg.covariance_regularization, 1.0, 1.0);
  covariances_.resize(index_.size());
  for (std::size_t i = 0; i < index_.size(); ++i) {
    const auto neighbors = index_.k_nearest(index_.point(i), k);
    Vec3 mean = Vec3::Zero();
    for (const auto& n : neighbors) mean += index_.point(n.index);
    mean /= static_cast<double>(neighbors.size());
    Mat3 cov = Mat3::Zero();
    for (const auto& n : neighbors) {
      const Vec3 d = index_.point(n.index) - mean;
      cov.noalias() += d * d.transpose();
    }
    // Ascending eigenvalues: the first eigenvector is the local surface normal.
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    covariances_[i] = eig.eigenvectors() * model.asDiagonal() * eig.eigenvectors().transpose();
  }
}

namespace {

struct Correspondence {
  std::size_t source = 0;
  std::size_t target = 0;
  Vec3 residual = Vec3::Zero();  // T * source - target
  Mat3 information = Mat3::Zero();
};

class Registration {
 public:
  Registration(const GicpCloud& source, const GicpCloud& target, const GicpConfig& cfg)
      : source_(source),
        target_(target),
        cfg_(cfg),
        cost_cap_(cfg.max_mahalanobis) {}

  double cost_cap() const { return cost_cap_; }
  void set_cost_cap(double cap) { cost_cap_ = cap; }

  // Mean truncated Mahalanobis cost over all source points; points without a
  // target neighbor in range contribute the cap. Fills `matches` with the
  // correspondences below the cap.
  double evaluate(const RigidTransform& t, std::vector<Correspondence>* matches) const {
    const Mat3 r = t.rotation_matrix();
    double total = 0.0;
    if (matches) matches->clear();
    for (std::size_t i = 0; i < source_.size(); ++i) {
      const Vec3 moved = t.apply(source_.points()[i]);
      const auto nn = target_.index().nearest_within(moved, cfg_.max_correspondence_distance);
      if (!nn) {
        total += cost_cap_;
        continue;
      }
      Correspondence c;
      c.source = i;
      c.target = nn->index;
      c.residual = moved - target_.points()[nn->index];
      const Mat3 combined =
          target_.covariances()[nn->index] + r * source_.covariances()[i] * r.transpose();
      c.information = combined.inverse();
      const double cost = c.residual.dot(c.information * c.residual);
      if (cost >= cost_cap_) {
        total += cost_cap_;
        continue;
      }
      total += cost;
      if (matches) matches->push_back(c);
    }
    return total / static_cast<double>(source_.size());
  }

  bool any_in_range(const RigidTransform& t) const {
    for (const Vec3& p : source_.points()) {
      if (target_.index().nearest_within(t.apply(p), cfg_.max_correspondence_distance)) {
        return true;
      }
    }
    return false;
  }

  // Gauss-Newton step for a left perturbation exp(delta) * T, delta = (w, v).
  Eigen::Matrix<double, 6, 1> step(const RigidTransform& t,
                                   const std::vector<Correspondence>& matches) const {
    Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> g = Eigen::Matrix<double, 6, 1>::Zero();
    for (const Correspondence& c : matches) {
      const Vec3 moved = t.apply(source_.points()[c.source]);
      Eigen::Matrix<double, 3, 6> j;
      j.leftCols<3>() = -skew(moved);
      j.rightCols<3>() = Mat3::Identity();
      const Eigen::Matrix<double, 6, 3> jt_info = j.transpose() * c.information;
      h.noalias() += jt_info * j;
      g.noalias() += jt_info * c.residual;
    }
    const Eigen::LDLT<Eigen::Matrix<double, 6, 6>> ldlt(h);
    Eigen::Matrix<double, 6, 1> delta = -ldlt.solve(g);
    if (!delta.allFinite()) delta.setZero();
    return delta;
  }

 private:
  const GicpCloud& source_;
  const GicpCloud& target_;
  const GicpConfig& cfg_;
  double cost_cap_;
};

constexpr double kCapShrink = 4.0;

RigidTransform retract(const Eigen::Matrix<double, 6, 1>& delta, const RigidTransform& t) {
  const Vec3 w = delta.head<3>();
  const double angle = w.norm();
  const Quat dq = angle > 0.0 ? Quat(Eigen::AngleAxisd(angle, w / angle)) : Quat::Identity();
  return RigidTransform(dq, delta.tail<3>()) * t;
}

}  // namespace

EgoMotionEstimate em_gicp(const GicpCloud& source, const GicpCloud& target, FrameId from,
                          FrameId to, const RigidTransform& init, const GicpConfig& cfg) {
  cfg.validate();
  Registration reg(source, target, cfg);
  // Graduated truncation: start with the cap a residual of the full
  // correspondence distance along a surface normal would cost and shrink it
  // towards max_mahalanobis. Lowering the cap never raises the objective.
  const double final_cap = cfg.max_mahalanobis;
  reg.set_cost_cap(std::max(final_cap, cfg.max_correspondence_distance *
                                           cfg.max_correspondence_distance /
                                           (2.0 * cfg.covariance_regularization)));
  if (!reg.any_in_range(init)) throw Error("registration diverged: no correspondences in range");

  EgoMotionEstimate est;
  est.from_frame = from;
  est.to_frame = to;
  est.method = EgoMethod::Gicp;

  RigidTransform current = init;
  std::vector<Correspondence> matches;
  double cost = reg.evaluate(current, &matches);
  est.diagnostics.cost_history.push_back(cost);

  std::vector<Correspondence> trial_matches;
  int iterations = 0;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    iterations = it;
    if (matches.size() < 6) break;
    const Eigen::Matrix<double, 6, 1> delta = reg.step(current, matches);

    // Backtracking keeps the objective non-increasing even when the
    // re-association changes the correspondence set.
    bool accepted = false;
    Eigen::Matrix<double, 6, 1> taken = delta;
    for (int halving = 0; halving < 8; ++halving) {
      const RigidTransform candidate = retract(taken, current);
      const double candidate_cost = reg.evaluate(candidate, &trial_matches);
      if (candidate_cost <= cost) {
        current = candidate;
        cost = candidate_cost;
        matches.swap(trial_matches);
        accepted = true;
        break;
      }
      taken *= 0.5;
    }
    const bool converged = !accepted || (taken.tail<3>().norm() < cfg.translation_tolerance &&
                                         taken.head<3>().norm() < cfg.rotation_tolerance);
    if (accepted) est.diagnostics.cost_history.push_back(cost);
    if (!converged) continue;
    if (reg.cost_cap() <= final_cap) break;
    reg.set_cost_cap(std::max(final_cap, reg.cost_cap() / kCapShrink));
    cost = reg.evaluate(current, &matches);
    est.diagnostics.cost_history.push_back(cost);
  }

  if (matches.empty()) throw Error("registration diverged: no correspondences in range");
  est.transform = current;
  est.diagnostics.iterations = iterations;
  est.diagnostics.inlier_count = static_cast<int>(matches.size());
  est.diagnostics.rms_residual = std::sqrt(cost);
  return est;
}

EgoMotionEstimate em_gicp(std::span<const Vec3> source, std::span<const Vec3> target,
                          FrameId from, FrameId to, const RigidTransform& init,
                          const GicpConfig& cfg) {
  const GicpCloud src(source, cfg);
  const GicpCloud dst(target, cfg);
  return em_gicp(src, dst, from, to, init, cfg);
}

}  // namespace radaccum
