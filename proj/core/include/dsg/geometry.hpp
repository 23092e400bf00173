#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <limits>

namespace dsg {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

/// Rigid transform (rotation + translation). Maps points from the local
/// frame into the parent frame: p_parent = rotation * p_local + translation.
struct Pose {
  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();

  Pose() = default;
  Pose(const Quat& q, const Vec3& t) : rotation(q.normalized()), translation(t) {}
  explicit Pose(const Vec3& t) : translation(t) {}

  static Pose identity() { return {}; }
  static Pose from_yaw(double yaw, const Vec3& t);

  [[nodiscard]] Pose inverse() const;
  [[nodiscard]] Vec3 transform(const Vec3& p) const { return rotation * p + translation; }
  [[nodiscard]] Mat3 rotation_matrix() const { return rotation.toRotationMatrix(); }
  [[nodiscard]] double yaw() const;

  Pose operator*(const Pose& rhs) const;
  bool operator==(const Pose& rhs) const;
};

/// Axis-aligned box. An empty box has min > max and absorbs on extend().
struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  Aabb() = default;
  Aabb(const Vec3& lo, const Vec3& hi) : min(lo), max(hi) {}

  [[nodiscard]] bool empty() const { return (min.array() > max.array()).any(); }
  [[nodiscard]] bool valid() const { return !empty(); }
  [[nodiscard]] Vec3 center() const { return 0.5 * (min + max); }
  [[nodiscard]] Vec3 extent() const { return max - min; }

  void extend(const Vec3& p);
  void extend(const Aabb& other);
  [[nodiscard]] Aabb inflated(double eps) const;

  [[nodiscard]] bool contains(const Vec3& p, double eps = 0.0) const;
  /// True if `inner` lies inside this box grown by `eps` on every side.
  [[nodiscard]] bool contains(const Aabb& inner, double eps = 0.0) const;
  /// Closed-interval overlap test.
  [[nodiscard]] bool intersects(const Aabb& other) const;
  /// Closed segment [a, b] against the closed box (slab method).
  [[nodiscard]] bool intersects_segment(const Vec3& a, const Vec3& b) const;
  /// Ray entry distance in [t_min, t_max], or a negative value on a miss.
  [[nodiscard]] double ray_entry(const Vec3& origin, const Vec3& dir, double t_min,
                                 double t_max) const;

  bool operator==(const Aabb& rhs) const { return min == rhs.min && max == rhs.max; }
};

Mat3 skew(const Vec3& v);

/// SO(3) exponential of a rotation vector.
Quat so3_exp(const Vec3& rotation_vector);
/// SO(3) logarithm; returns the rotation vector with angle in [0, pi].
Vec3 so3_log(const Quat& q);
/// Right Jacobian of SO(3) and its inverse.
Mat3 so3_right_jacobian(const Vec3& phi);
Mat3 so3_right_jacobian_inv(const Vec3& phi);

/// Geodesic angle between two rotations, radians.
double rotation_angle(const Quat& a, const Quat& b);

/// Shortest-arc interpolation of rotation and linear interpolation of
/// translation; alpha in [0, 1].
Pose interpolate(const Pose& a, const Pose& b, double alpha);

}  // namespace dsg
