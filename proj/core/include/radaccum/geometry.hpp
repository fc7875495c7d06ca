#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace radaccum {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Quat = Eigen::Quaterniond;

/// Rigid motion in SE(3): p -> R p + t.
///
/// The rotation is held as a unit quaternion canonicalized to w >= 0, so two
/// transforms describing the same motion compare equal component-wise.
/// Matrices only appear at I/O boundaries (see FromMatrix / matrix()).
class RigidTransform {
 public:
  RigidTransform() = default;
  RigidTransform(const Quat& rotation, const Vec3& translation);
  RigidTransform(const Mat3& rotation, const Vec3& translation);

  static RigidTransform Identity() { return {}; }
  static RigidTransform Translation(const Vec3& t) { return {Quat::Identity(), t}; }
  /// Rotation about +z by `yaw` radians followed by translation `t`.
  static RigidTransform FromYaw(double yaw, const Vec3& t = Vec3::Zero());
  /// Accepts a homogeneous 4x4 matrix whose upper-left block is a rotation
  /// (orthonormal, det +1) within `tolerance`; throws radaccum::Error otherwise.
  static RigidTransform FromMatrix(const Mat4& m, double tolerance = 1e-6);

  const Quat& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  Mat3 rotation_matrix() const { return rotation_.toRotationMatrix(); }
  Mat4 matrix() const;

  Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
  Vec3 rotate(const Vec3& v) const { return rotation_ * v; }

  RigidTransform inverse() const;
  /// (a * b).apply(p) == a.apply(b.apply(p))
  RigidTransform operator*(const RigidTransform& rhs) const;

  /// Heading change of the x axis projected onto the xy plane.
  double yaw() const;
  /// Rotation angle in radians, in [0, pi].
  double angle() const;

 private:
  Quat rotation_ = Quat::Identity();
  Vec3 translation_ = Vec3::Zero();
};

inline RigidTransform compose(const RigidTransform& a, const RigidTransform& b) { return a * b; }
inline RigidTransform invert(const RigidTransform& t) { return t.inverse(); }

/// Canonical representative of the double cover (w >= 0), normalized.
Quat canonical(const Quat& q);

/// Body-frame twist: angular velocity and linear velocity, both expressed in
/// the moving frame. exp_se3(twist) integrates it over unit time.
struct Twist {
  Vec3 angular = Vec3::Zero();
  Vec3 linear = Vec3::Zero();
};

RigidTransform exp_se3(const Twist& xi);
Twist log_se3(const RigidTransform& t);

Mat3 skew(const Vec3& v);

struct SphericalDirection {
  double range = 0.0;      // meters
  double azimuth = 0.0;    // (-pi, pi]
  double elevation = 0.0;  // [-pi/2, pi/2]
};

SphericalDirection to_spherical(const Vec3& p);
Vec3 to_cartesian(const SphericalDirection& s);

/// Angle between the sensor boresight and the line of sight,
/// acos(cos(azimuth) * cos(elevation)). Result is in [0, pi].
double observation_angle(double azimuth, double elevation);

/// Wrap an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace radaccum
