#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "srp/core.hpp"
#include "srp/se3.hpp"

namespace srp {

enum class RotationMethod {
  Hopf,       // SO(3): layered fibration grid (spiral base × staggered fiber angles)
  Fibonacci,  // SO(3): Super-Fibonacci spiral
  Grid2d,     // SO(2): uniform angle partition
};

inline const char* to_string(RotationMethod m) {
  switch (m) {
    case RotationMethod::Hopf: return "hopf";
    case RotationMethod::Fibonacci: return "fibonacci";
    case RotationMethod::Grid2d: return "grid2d";
  }
  return "?";
}

inline RotationMethod rotationMethodFromString(const std::string& s) {
  if (s == "hopf") return RotationMethod::Hopf;
  if (s == "fibonacci") return RotationMethod::Fibonacci;
  if (s == "grid2d") return RotationMethod::Grid2d;
  raise(Errc::ConfigError, "unknown rotation method '" + s + "'");
}

/// Deterministic, duplicate-free set of n1 orientations.
template <int D>
struct RotationSample {
  std::vector<Rotation<D>> rotations;
  RotationMethod method = RotationMethod::Grid2d;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(rotations.size()); }
  std::string tag() const {
    return std::string(to_string(method)) + "/n" + std::to_string(rotations.size()) + "/s" +
           std::to_string(seed);
  }
};

namespace detail {

inline double frac(double x) { return x - std::floor(x); }

inline constexpr double kGolden = 1.61803398874989484820;

// Super-Fibonacci spiral constants.
inline constexpr double kSfPhi = 1.41421356237309504880;  // √2
inline constexpr double kSfPsi = 1.533751168755204288118041;

inline Rotation<3> hopfRotation(double u, double phi, double psi) {
  // Hopf coordinates: u ∈ [0,1) stratifies cos θ; φ base azimuth; ψ fiber.
  // ψ and ψ+π give antipodal quaternions (the same rotation), so the fiber
  // coordinate repeats with period π.
  const double cosHalfTheta = std::sqrt(1.0 - u);
  const double sinHalfTheta = std::sqrt(u);
  Eigen::Quaterniond q(cosHalfTheta * std::cos(psi), cosHalfTheta * std::sin(psi),
                       sinHalfTheta * std::cos(phi + psi), sinHalfTheta * std::sin(phi + psi));
  return Rotation<3>::fromQuaternion(q);
}

// Fiber points per base point for the layered grid: best divisor m ≥ 2 with
// b = n/m ≥ 4 whose fiber gap 2π/m balances the base-sphere gap √(8π/(√3·b))
// within 1.7×; otherwise 1 (pure spiral with golden-sequence fiber phases).
inline int hopfFiberCount(int n) {
  int best = 1;
  double bestScore = 1.7;
  for (int m = 2; m <= n / 4; ++m) {
    if (n % m) continue;
    const double gf = 2.0 * kPi / m;
    const double gb = std::sqrt(8.0 * kPi / (std::sqrt(3.0) * (n / m)));
    const double score = std::max(gf, gb) / std::min(gf, gb);
    if (score < bestScore) {
      bestScore = score;
      best = m;
    }
  }
  return best;
}

}  // namespace detail

/// n1 deterministic orientations. n1 = 1 is anchored at the identity for every
/// method; grid2d partitions the circle uniformly starting at angle 0; the
/// SO(3) methods are low-discrepancy sequences whose phase is seed-derived.
template <int D>
RotationSample<D> sample_rotations(int n1, RotationMethod method, std::uint64_t seed = 0) {
  if (n1 < 1) raise(Errc::ConfigError, "n1 must be >= 1");
  RotationSample<D> out;
  out.method = method;
  out.seed = seed;
  out.rotations.reserve(static_cast<std::size_t>(n1));

  if constexpr (D == 2) {
    if (method != RotationMethod::Grid2d)
      raise(Errc::BadMethodForDimension, std::string(to_string(method)) + " samples SO(3), not SO(2)");
    for (int k = 0; k < n1; ++k)
      out.rotations.push_back(Rotation<2>::fromAngle(2.0 * kPi * k / n1));
    return out;
  } else {
    if (method == RotationMethod::Grid2d)
      raise(Errc::BadMethodForDimension, "grid2d samples SO(2), not SO(3)");
    if (n1 == 1) {
      out.rotations.push_back(Rotation<3>::identity());
      return out;
    }
    // Seed-derived phase offsets in [0,1).
    const double s1 = (seed == 0) ? 0.0 : detail::frac(mix64(seed) * 0x1p-64);
    const double s2 = (seed == 0) ? 0.0 : detail::frac(mix64(seed ^ 0x5851f42d4c957f2dull) * 0x1p-64);

    if (method == RotationMethod::Hopf) {
      // Layered fibration grid: b base points on a golden-spiral sphere, m
      // evenly spaced fiber angles per base point, fiber phase staggered by
      // the golden sequence so neighboring rings interleave.
      const int m = detail::hopfFiberCount(n1);
      const int b = n1 / m;
      const double goldenAngle = 2.0 * kPi * (1.0 - 1.0 / detail::kGolden);
      for (int i = 0; i < b; ++i) {
        const double u = (i + 0.5) / b;
        const double phi = goldenAngle * i + 2.0 * kPi * s1;
        const double off = detail::frac(i / detail::kGolden + s2);
        for (int j = 0; j < m; ++j)
          out.rotations.push_back(detail::hopfRotation(u, phi, (kPi / m) * (j + off)));
      }
    } else {
      for (int k = 0; k < n1; ++k) {
        const double s = k + 0.5;
        const double t = s / n1;
        const double d = 2.0 * kPi * s;
        const double rr = std::sqrt(t);
        const double RR = std::sqrt(1.0 - t);
        const double alpha = d / detail::kSfPhi + 2.0 * kPi * s1;
        const double beta = d / detail::kSfPsi + 2.0 * kPi * s2;
        Eigen::Quaterniond q(rr * std::sin(alpha), rr * std::cos(alpha), RR * std::sin(beta),
                             RR * std::cos(beta));
        out.rotations.push_back(Rotation<3>::fromQuaternion(q));
      }
    }
    return out;
  }
}

/// Geodesic angle between two rotations (radians, [0, π]).
inline double rotationAngle(const Rotation<3>& a, const Rotation<3>& b) {
  return a.inverse().compose(b).logVector().norm();
}
inline double rotationAngle(const Rotation<2>& a, const Rotation<2>& b) {
  return std::abs(a.inverse().compose(b).logAngle());
}

}  // namespace srp
