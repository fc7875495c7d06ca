#include "radaccum/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "radaccum/error.hpp"

namespace radaccum {

Quat canonical(const Quat& q) {
  Quat n = q.normalized();
  if (n.w() < 0.0) n.coeffs() = -n.coeffs();
  return n;
}

RigidTransform::RigidTransform(const Quat& rotation, const Vec3& translation)
    : rotation_(canonical(rotation)), translation_(translation) {}

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation)
    : RigidTransform(Quat(rotation), translation) {}

RigidTransform RigidTransform::FromYaw(double yaw, const Vec3& t) {
  return {Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ())), t};
}

RigidTransform RigidTransform::FromMatrix(const Mat4& m, double tolerance) {
  if (!m.allFinite()) throw Error("transform matrix has non-finite entries");
  const Mat3 r = m.topLeftCorner<3, 3>();
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > tolerance || std::abs(r.determinant() - 1.0) > tolerance) {
    throw Error("transform matrix is not a proper rotation");
  }
  const Eigen::RowVector4d last = m.row(3);
  if ((last - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > tolerance) {
    throw Error("transform matrix last row must be 0 0 0 1");
  }
  return {Quat(r), m.topRightCorner<3, 1>()};
}

Mat4 RigidTransform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_matrix();
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

RigidTransform RigidTransform::inverse() const {
  const Quat inv = rotation_.conjugate();
  return {inv, -(inv * translation_)};
}

RigidTransform RigidTransform::operator*(const RigidTransform& rhs) const {
  return {rotation_ * rhs.rotation_, rotation_ * rhs.translation_ + translation_};
}

double RigidTransform::yaw() const {
  const Vec3 heading = rotation_ * Vec3::UnitX();
  return std::atan2(heading.y(), heading.x());
}

double RigidTransform::angle() const {
  return 2.0 * std::atan2(rotation_.vec().norm(), std::abs(rotation_.w()));
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

namespace {

// Left Jacobian of SO(3) and its inverse; series expansions below 1e-6 rad.
Mat3 left_jacobian(const Vec3& omega) {
  const double theta = omega.norm();
  const Mat3 w = skew(omega);
  if (theta < 1e-6) return Mat3::Identity() + 0.5 * w + w * w / 6.0;
  const double t2 = theta * theta;
  return Mat3::Identity() + (1.0 - std::cos(theta)) / t2 * w +
         (theta - std::sin(theta)) / (t2 * theta) * w * w;
}

Mat3 left_jacobian_inverse(const Vec3& omega) {
  const double theta = omega.norm();
  const Mat3 w = skew(omega);
  if (theta < 1e-6) return Mat3::Identity() - 0.5 * w + w * w / 12.0;
  const double half = 0.5 * theta;
  const double coef = (1.0 - half * std::cos(half) / std::sin(half)) / (theta * theta);
  return Mat3::Identity() - 0.5 * w + coef * w * w;
}

}  // namespace

RigidTransform exp_se3(const Twist& xi) {
  const double theta = xi.angular.norm();
  const Quat q = theta > 0.0 ? Quat(Eigen::AngleAxisd(theta, xi.angular / theta))
                             : Quat::Identity();
  return {q, left_jacobian(xi.angular) * xi.linear};
}

Twist log_se3(const RigidTransform& t) {
  const Eigen::AngleAxisd aa(t.rotation());
  Twist xi;
  xi.angular = aa.axis() * aa.angle();
  if (!xi.angular.allFinite()) xi.angular.setZero();
  xi.linear = left_jacobian_inverse(xi.angular) * t.translation();
  return xi;
}

SphericalDirection to_spherical(const Vec3& p) {
  SphericalDirection s;
  s.range = p.norm();
  s.azimuth = std::atan2(p.y(), p.x());
  if (s.azimuth == -std::numbers::pi) s.azimuth = std::numbers::pi;
  s.elevation = s.range > 0.0 ? std::asin(std::clamp(p.z() / s.range, -1.0, 1.0)) : 0.0;
  return s;
}

Vec3 to_cartesian(const SphericalDirection& s) {
  const double ce = std::cos(s.elevation);
  return s.range * Vec3(ce * std::cos(s.azimuth), ce * std::sin(s.azimuth), std::sin(s.elevation));
}

double observation_angle(double azimuth, double elevation) {
  return std::acos(std::clamp(std::cos(azimuth) * std::cos(elevation), -1.0, 1.0));
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

}  // namespace radaccum
