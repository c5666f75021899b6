#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cmath>
#include <vector>

#include "srp/core.hpp"

namespace srp {

inline constexpr double kPi = 3.14159265358979323846;

template <int D>
struct Rotation;

/// Planar rotation, angle stored in [0, 2π).
template <>
struct Rotation<2> {
  double theta = 0.0;

  static Rotation identity() { return {}; }
  static Rotation fromAngle(double a) {
    Rotation r;
    r.theta = std::fmod(a, 2.0 * kPi);
    if (r.theta < 0.0) r.theta += 2.0 * kPi;
    return r;
  }

  Eigen::Matrix2d matrix() const { return Eigen::Rotation2Dd(theta).toRotationMatrix(); }
  Vec<2> apply(const Vec<2>& p) const { return matrix() * p; }
  Rotation compose(const Rotation& o) const { return fromAngle(theta + o.theta); }
  Rotation inverse() const { return fromAngle(-theta); }

  /// Log as the wrapped angle in (-π, π].
  double logAngle() const {
    double a = std::fmod(theta, 2.0 * kPi);
    if (a > kPi) a -= 2.0 * kPi;
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
  }

  bool approxEqual(const Rotation& o, double tol = 1e-9) const {
    return std::abs(compose(o.inverse()).logAngle()) <= tol;
  }
};

/// Spatial rotation, unit quaternion with canonical sign (scalar part ≥ 0).
template <>
struct Rotation<3> {
  Eigen::Quaterniond q{1.0, 0.0, 0.0, 0.0};

  static Rotation identity() { return {}; }
  static Rotation fromQuaternion(const Eigen::Quaterniond& raw) {
    Rotation r;
    r.q = raw.normalized();
    if (r.q.w() < 0.0) r.q.coeffs() = -r.q.coeffs();
    return r;
  }
  static Rotation fromAxisAngle(const Vec<3>& axis, double angle) {
    return fromQuaternion(Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis.normalized())));
  }

  Eigen::Matrix3d matrix() const { return q.toRotationMatrix(); }
  Vec<3> apply(const Vec<3>& p) const { return q * p; }
  Rotation compose(const Rotation& o) const { return fromQuaternion(q * o.q); }
  Rotation inverse() const { return fromQuaternion(q.conjugate()); }

  /// Log as the rotation vector ω (axis·angle, angle ∈ [0, π]).
  Vec<3> logVector() const {
    const double s = q.vec().norm();
    const double w = std::abs(q.w());
    if (s < 1e-12) return 2.0 / std::max(w, 1e-300) * q.vec();  // small-angle limit of 2·atan2(s,w)/s
    const double f = 2.0 * std::atan2(s, w) / s;
    return (q.w() >= 0.0 ? f : -f) * q.vec();
  }

  bool approxEqual(const Rotation& o, double tol = 1e-9) const {
    return compose(o.inverse()).logVector().norm() <= tol;
  }
};

/// Rigid motion τ = (r, t) acting as x ↦ r·x + t.
template <int D>
struct RigidTransform {
  Rotation<D> r;
  Vec<D> t{Vec<D>::Zero()};

  static RigidTransform identity() { return {}; }

  Vec<D> apply(const Vec<D>& p) const { return r.apply(p) + t; }
  RigidTransform compose(const RigidTransform& o) const {
    return {r.compose(o.r), r.apply(o.t) + t};
  }
  RigidTransform inverse() const {
    const Rotation<D> ri = r.inverse();
    return {ri, -ri.apply(t)};
  }
  bool approxEqual(const RigidTransform& o, double tol = 1e-9) const {
    return r.approxEqual(o.r, tol) && (t - o.t).norm() <= tol;
  }
};

template <int D>
RigidTransform<D> operator*(const RigidTransform<D>& a, const RigidTransform<D>& b) {
  return a.compose(b);
}

namespace detail {

/// Left-Jacobian inverse: v = V(ω)⁻¹·t recovers the translational log
/// component from a transform's translation.
inline Vec<3> jacobianInverseApply(const Vec<3>& omega, const Vec<3>& t) {
  const double theta = omega.norm();
  Eigen::Matrix3d W;
  W << 0, -omega.z(), omega.y(), omega.z(), 0, -omega.x(), -omega.y(), omega.x(), 0;
  double c;
  if (theta < 1e-4) {
    const double t2 = theta * theta;
    c = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
  } else {
    c = (1.0 - 0.5 * theta / std::tan(0.5 * theta)) / (theta * theta);
  }
  const Eigen::Matrix3d Vinv = Eigen::Matrix3d::Identity() - 0.5 * W + c * (W * W);
  return Vinv * t;
}

inline Vec<2> jacobianInverseApply(double theta, const Vec<2>& t) {
  double a, b;
  if (std::abs(theta) < 1e-6) {
    a = 1.0 - theta * theta / 6.0;
    b = 0.5 * theta - theta * theta * theta / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta;
  }
  const double den = a * a + b * b;
  return Vec<2>((a * t.x() + b * t.y()) / den, (-b * t.x() + a * t.y()) / den);
}

}  // namespace detail

/// Log of a rigid transform: rotation vector ω (angle θ in 2D) and
/// translational component v with t = V(ω)·v.
template <int D>
struct Twist {
  std::conditional_t<D == 3, Vec<3>, double> omega;
  Vec<D> v;

  /// Squared Frobenius norm of the matrix log of the homogeneous matrix:
  /// the skew block contributes 2‖ω‖², the translation column ‖v‖².
  double rotationSq() const {
    if constexpr (D == 3)
      return 2.0 * omega.squaredNorm();
    else
      return 2.0 * omega * omega;
  }
};

template <int D>
Twist<D> logTwist(const RigidTransform<D>& tau) {
  Twist<D> tw;
  if constexpr (D == 3)
    tw.omega = tau.r.logVector();
  else
    tw.omega = tau.r.logAngle();
  tw.v = detail::jacobianInverseApply(tw.omega, tau.t);
  return tw;
}

/// Length of the relative displacement in the weighted log metric:
/// √(w_rot²·‖log R‖_F² + w_trans²·‖v‖²). With unit weights this equals the
/// Frobenius norm of the matrix logarithm of the relative homogeneous matrix.
template <int D>
double riemannian_distance(const RigidTransform<D>& tau1, const RigidTransform<D>& tau2,
                           double wRot = 1.0, double wTrans = 1.0) {
  if (wRot <= 0.0 || wTrans <= 0.0) raise(Errc::ConfigError, "metric weights must be positive");
  const Twist<D> tw = logTwist(tau1.inverse() * tau2);
  return std::sqrt(wRot * wRot * tw.rotationSq() + wTrans * wTrans * tw.v.squaredNorm());
}

/// Result of the min-min distance between two sampled configuration sets.
template <int D>
struct FiberDistanceResult {
  double distance = 0.0;
  int index1 = -1, index2 = -1;  // arg-min positions within each set
  RigidTransform<D> tau1, tau2;
};

/// Minimum pairwise riemannian_distance over two configuration lists, with the
/// arg-min pair; ties break toward the lexicographically smallest (i, j).
template <int D>
FiberDistanceResult<D> fiber_distance(const std::vector<RigidTransform<D>>& f1,
                                      const std::vector<RigidTransform<D>>& f2, double wRot = 1.0,
                                      double wTrans = 1.0) {
  if (f1.empty() || f2.empty()) raise(Errc::EmptyFiber, "fiber_distance on empty fiber");
  FiberDistanceResult<D> best;
  best.distance = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(f1.size()); ++i)
    for (int j = 0; j < static_cast<int>(f2.size()); ++j) {
      const double d = riemannian_distance(f1[i], f2[j], wRot, wTrans);
      if (d < best.distance) {
        best.distance = d;
        best.index1 = i;
        best.index2 = j;
        best.tau1 = f1[i];
        best.tau2 = f2[j];
      }
    }
  return best;
}

}  // namespace srp
