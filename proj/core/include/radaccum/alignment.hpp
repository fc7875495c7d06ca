#pragma once

#include <span>

#include "radaccum/geometry.hpp"

namespace radaccum {

/// Relative threshold on the second singular value of the centered source
/// points below which the rotation is considered unresolvable.
inline constexpr double kCollinearityThreshold = 1e-9;

/// Least-squares rigid transform T minimizing sum_i w_i |T src_i - dst_i|^2
/// (Kabsch with a reflection guard).
///
/// Throws radaccum::Error when fewer than three pairs are given, the spans
/// differ in length, or the source points are collinear
/// ("rotation under-determined").
RigidTransform align_correspondences(std::span<const Vec3> src, std::span<const Vec3> dst,
                                     std::span<const double> weights = {});

}  // namespace radaccum
