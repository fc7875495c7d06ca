#pragma once

#include <span>

#include "radaccum/geometry.hpp"

namespace radaccum {

/// Weighted rotation average: the dominant eigenvector of the 4x4 matrix
/// sum_i w_i q_i q_i^T. Insensitive to the sign of each input quaternion.
///
/// `weights` may be empty (uniform); otherwise it must match `rotations` in
/// length, be non-negative and not all zero.
Quat average_quaternions(std::span<const Quat> rotations, std::span<const double> weights = {});

}  // namespace radaccum
