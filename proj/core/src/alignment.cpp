#include "radaccum/alignment.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "radaccum/error.hpp"

namespace radaccum {

RigidTransform align_correspondences(std::span<const Vec3> src, std::span<const Vec3> dst,
                                     std::span<const double> weights) {
  if (src.size() != dst.size()) throw Error("correspondence lists differ in length");
  if (src.size() < 3) throw Error("at least 3 correspondences are required");
  if (!weights.empty() && weights.size() != src.size()) {
    throw Error("weight count does not match correspondence count");
  }

  double total = 0.0;
  Vec3 src_mean = Vec3::Zero();
  Vec3 dst_mean = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w >= 0.0)) throw Error("correspondence weights must be non-negative");
    src_mean += w * src[i];
    dst_mean += w * dst[i];
    total += w;
  }
  if (total <= 0.0) throw Error("correspondence weights are all zero");
  src_mean /= total;
  dst_mean /= total;

  Mat3 cross = Mat3::Zero();
  Eigen::MatrixX3d centered(src.size(), 3);
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    const Vec3 s = src[i] - src_mean;
    cross.noalias() += w * s * (dst[i] - dst_mean).transpose();
    centered.row(static_cast<Eigen::Index>(i)) = std::sqrt(w) * s.transpose();
  }

  // Singular values of the centered points themselves; squaring them into a
  // scatter matrix would bury a rank deficiency under rounding noise.
  const Eigen::JacobiSVD<Eigen::MatrixX3d> spread_svd(centered);
  const Vec3 sv = spread_svd.singularValues();
  if (!(sv(0) > 0.0) || sv(1) < kCollinearityThreshold * sv(0)) {
    throw Error("rotation under-determined: correspondences are collinear");
  }

  const Eigen::JacobiSVD<Mat3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  if ((v * u.transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  const Mat3 rotation = v * d * u.transpose();
  return {rotation, dst_mean - rotation * src_mean};
}

}  // namespace radaccum
