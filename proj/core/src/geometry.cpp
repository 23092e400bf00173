#include "dsg/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace dsg {

Pose Pose::from_yaw(double yaw, const Vec3& t) {
  return Pose(Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ())), t);
}

Pose Pose::inverse() const {
  const Quat inv = rotation.conjugate();
  Pose out;
  out.rotation = inv;
  out.translation = -(inv * translation);
  return out;
}

double Pose::yaw() const {
  const Vec3 x = rotation * Vec3::UnitX();
  return std::atan2(x.y(), x.x());
}

Pose Pose::operator*(const Pose& rhs) const {
  Pose out;
  out.rotation = (rotation * rhs.rotation).normalized();
  out.translation = rotation * rhs.translation + translation;
  return out;
}

bool Pose::operator==(const Pose& rhs) const {
  return rotation.coeffs() == rhs.rotation.coeffs() && translation == rhs.translation;
}

void Aabb::extend(const Vec3& p) {
  min = min.cwiseMin(p);
  max = max.cwiseMax(p);
}

void Aabb::extend(const Aabb& other) {
  if (other.empty()) {
    return;
  }
  min = min.cwiseMin(other.min);
  max = max.cwiseMax(other.max);
}

Aabb Aabb::inflated(double eps) const {
  if (empty()) {
    return *this;
  }
  return {min.array() - eps, max.array() + eps};
}

bool Aabb::contains(const Vec3& p, double eps) const {
  return (p.array() >= min.array() - eps).all() && (p.array() <= max.array() + eps).all();
}

bool Aabb::contains(const Aabb& inner, double eps) const {
  if (inner.empty()) {
    return true;
  }
  return (inner.min.array() >= min.array() - eps).all() &&
         (inner.max.array() <= max.array() + eps).all();
}

bool Aabb::intersects(const Aabb& other) const {
  if (empty() || other.empty()) {
    return false;
  }
  return (min.array() <= other.max.array()).all() && (other.min.array() <= max.array()).all();
}

bool Aabb::intersects_segment(const Vec3& a, const Vec3& b) const {
  if (empty()) {
    return false;
  }
  double t0 = 0.0;
  double t1 = 1.0;
  const Vec3 d = b - a;
  for (int i = 0; i < 3; ++i) {
    if (d[i] == 0.0) {
      if (a[i] < min[i] || a[i] > max[i]) {
        return false;
      }
      continue;
    }
    double lo = (min[i] - a[i]) / d[i];
    double hi = (max[i] - a[i]) / d[i];
    if (lo > hi) {
      std::swap(lo, hi);
    }
    t0 = std::max(t0, lo);
    t1 = std::min(t1, hi);
    if (t0 > t1) {
      return false;
    }
  }
  return true;
}

double Aabb::ray_entry(const Vec3& origin, const Vec3& dir, double t_min, double t_max) const {
  double t0 = t_min;
  double t1 = t_max;
  for (int i = 0; i < 3; ++i) {
    if (dir[i] == 0.0) {
      if (origin[i] < min[i] || origin[i] > max[i]) {
        return -1.0;
      }
      continue;
    }
    const double inv = 1.0 / dir[i];
    double lo = (min[i] - origin[i]) * inv;
    double hi = (max[i] - origin[i]) * inv;
    if (lo > hi) {
      std::swap(lo, hi);
    }
    t0 = std::max(t0, lo);
    t1 = std::min(t1, hi);
    if (t0 > t1) {
      return -1.0;
    }
  }
  return t0;
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

Quat so3_exp(const Vec3& rotation_vector) {
  const double angle = rotation_vector.norm();
  if (angle < 1e-12) {
    // first-order expansion keeps the map smooth near identity
    Quat q(1.0, 0.5 * rotation_vector.x(), 0.5 * rotation_vector.y(), 0.5 * rotation_vector.z());
    return q.normalized();
  }
  return Quat(Eigen::AngleAxisd(angle, rotation_vector / angle));
}

Vec3 so3_log(const Quat& q_in) {
  Quat q = q_in.normalized();
  if (q.w() < 0.0) {
    q.coeffs() = -q.coeffs();
  }
  const Vec3 v = q.vec();
  const double sin_half = v.norm();
  if (sin_half < 1e-12) {
    return 2.0 * v;
  }
  const double angle = 2.0 * std::atan2(sin_half, q.w());
  return v * (angle / sin_half);
}

Mat3 so3_right_jacobian(const Vec3& phi) {
  const double theta = phi.norm();
  const Mat3 k = skew(phi);
  if (theta < 1e-6) {
    return Mat3::Identity() - 0.5 * k + k * k / 6.0;
  }
  const double t2 = theta * theta;
  return Mat3::Identity() - (1.0 - std::cos(theta)) / t2 * k +
         (theta - std::sin(theta)) / (t2 * theta) * k * k;
}

Mat3 so3_right_jacobian_inv(const Vec3& phi) {
  const double theta = phi.norm();
  const Mat3 k = skew(phi);
  if (theta < 1e-6) {
    return Mat3::Identity() + 0.5 * k + k * k / 12.0;
  }
  const double t2 = theta * theta;
  const double coeff = 1.0 / t2 - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  return Mat3::Identity() + 0.5 * k + coeff * k * k;
}

double rotation_angle(const Quat& a, const Quat& b) {
  return so3_log(a.conjugate() * b).norm();
}

Pose interpolate(const Pose& a, const Pose& b, double alpha) {
  Pose out;
  out.rotation = a.rotation.slerp(alpha, b.rotation).normalized();
  out.translation = (1.0 - alpha) * a.translation + alpha * b.translation;
  return out;
}

}  // namespace dsg
