#pragma once

// Reference implementations used as test oracles. They deliberately avoid the
// library's code paths (and Eigen's solvers): plain arrays, brute force and
// textbook formulas.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

using V3 = std::array<double, 3>;
using M4 = std::array<std::array<double, 4>, 4>;
using Q = std::array<double, 4>;  // w, x, y, z

inline double dist(const V3& a, const V3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double nearest_distance(const V3& q, const std::vector<V3>& set) {
  double best = std::numeric_limits<double>::infinity();
  for (const V3& p : set) best = std::min(best, dist(q, p));
  return best;
}

inline std::size_t nearest_index(const V3& q, const std::vector<V3>& set) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double d = dist(q, set[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

// O(n^2) symmetric Chamfer distance: mean of the two directed means.
inline double chamfer(const std::vector<V3>& a, const std::vector<V3>& b) {
  double ab = 0.0, ba = 0.0;
  for (const V3& p : a) ab += nearest_distance(p, b);
  for (const V3& p : b) ba += nearest_distance(p, a);
  return 0.5 * (ab / static_cast<double>(a.size()) + ba / static_cast<double>(b.size()));
}

inline M4 identity4() {
  M4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

inline M4 mul(const M4& a, const M4& b) {
  M4 c{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// Rigid inverse [R^T, -R^T t].
inline M4 rigid_inverse(const M4& m) {
  M4 r = identity4();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = m[j][i];
  for (int i = 0; i < 3; ++i) {
    r[i][3] = 0.0;
    for (int j = 0; j < 3; ++j) r[i][3] -= m[j][i] * m[j][3];
  }
  return r;
}

inline V3 apply(const M4& m, const V3& p) {
  V3 out{};
  for (int i = 0; i < 3; ++i) out[i] = m[i][0] * p[0] + m[i][1] * p[1] + m[i][2] * p[2] + m[i][3];
  return out;
}

// Homogeneous matrix from a (not necessarily unit) quaternion and translation.
inline M4 from_quaternion(const Q& q_in, const V3& t) {
  const double n = std::sqrt(q_in[0] * q_in[0] + q_in[1] * q_in[1] + q_in[2] * q_in[2] +
                             q_in[3] * q_in[3]);
  const double w = q_in[0] / n, x = q_in[1] / n, y = q_in[2] / n, z = q_in[3] / n;
  M4 m = identity4();
  m[0][0] = 1 - 2 * (y * y + z * z);
  m[0][1] = 2 * (x * y - w * z);
  m[0][2] = 2 * (x * z + w * y);
  m[1][0] = 2 * (x * y + w * z);
  m[1][1] = 1 - 2 * (x * x + z * z);
  m[1][2] = 2 * (y * z - w * x);
  m[2][0] = 2 * (x * z - w * y);
  m[2][1] = 2 * (y * z + w * x);
  m[2][2] = 1 - 2 * (x * x + y * y);
  m[0][3] = t[0];
  m[1][3] = t[1];
  m[2][3] = t[2];
  return m;
}

inline M4 rot_z(double angle, const V3& t = {0, 0, 0}) {
  return from_quaternion({std::cos(angle / 2), 0, 0, std::sin(angle / 2)}, t);
}

// Rotation angle of the upper-left 3x3 block via acos((trace - 1) / 2).
inline double rotation_angle(const M4& m) {
  const double c = (m[0][0] + m[1][1] + m[2][2] - 1.0) / 2.0;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

struct SymEigen4 {
  std::array<double, 4> values{};
  M4 vectors{};  // columns
};

// Cyclic Jacobi eigen-decomposition of a symmetric 4x4 matrix.
inline SymEigen4 jacobi4(M4 a) {
  M4 v = identity4();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < 4; ++p)
      for (int q = p + 1; q < 4; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-300) break;
    for (int p = 0; p < 4; ++p) {
      for (int q = p + 1; q < 4; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 4; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 4; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 4; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  SymEigen4 out;
  for (int i = 0; i < 4; ++i) out.values[i] = a[i][i];
  out.vectors = v;
  return out;
}

// Dominant eigenvector of sum_i w_i q_i q_i^T, sign fixed to w >= 0.
inline Q average_quaternion(const std::vector<Q>& qs, const std::vector<double>& weights = {}) {
  M4 m{};
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m[r][c] += w * qs[i][r] * qs[i][c];
  }
  const SymEigen4 e = jacobi4(m);
  int best = 0;
  for (int i = 1; i < 4; ++i)
    if (e.values[i] > e.values[best]) best = i;
  Q q{e.vectors[0][best], e.vectors[1][best], e.vectors[2][best], e.vectors[3][best]};
  const double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
  const double sign = q[0] < 0 ? -1.0 : 1.0;
  for (double& c : q) c *= sign / n;
  return q;
}

}  // namespace oracle
