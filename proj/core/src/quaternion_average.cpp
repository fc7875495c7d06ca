#include "radaccum/quaternion_average.hpp"

#include <Eigen/Eigenvalues>

#include "radaccum/error.hpp"

namespace radaccum {

Quat average_quaternions(std::span<const Quat> rotations, std::span<const double> weights) {
  if (rotations.empty()) throw Error("no rotations to average");
  if (!weights.empty() && weights.size() != rotations.size()) {
    throw Error("weight count does not match rotation count");
  }

  Eigen::Matrix4d accum = Eigen::Matrix4d::Zero();
  double total = 0.0;
  for (std::size_t i = 0; i < rotations.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w >= 0.0)) throw Error("rotation weights must be non-negative");
    const Eigen::Vector4d q = rotations[i].normalized().coeffs();
    accum.noalias() += w * q * q.transpose();
    total += w;
  }
  if (total <= 0.0) throw Error("rotation weights are all zero");

  // Eigenvalues come back in ascending order.
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(accum / total);
  const Eigen::Vector4d dominant = solver.eigenvectors().col(3);
  Quat q;
  q.coeffs() = dominant;
  return canonical(q);
}

}  // namespace radaccum
