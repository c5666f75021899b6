#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "srp/core.hpp"

namespace srp {

/// Boundary representation of a solid: triangles for d=3, directed segments
/// forming closed loops for d=2. Counter-clockwise orientation encloses
/// material (outward normals).
template <int D>
struct TriMesh {
  static constexpr int kFaceSize = D;  // 3 vertices per triangle, 2 per segment

  std::vector<Vec<D>> vertices;
  std::vector<std::array<int, kFaceSize>> faces;

  Box<D> bounds() const {
    Box<D> b = Box<D>::empty();
    for (const auto& v : vertices) b.expand(v);
    return b;
  }

  TriMesh translated(const Vec<D>& t) const {
    TriMesh out = *this;
    for (auto& v : out.vertices) v += t;
    return out;
  }
};

namespace detail {

inline double faceMeasure(const TriMesh<3>& m, const std::array<int, 3>& f) {
  const Vec<3>&a = m.vertices[f[0]], &b = m.vertices[f[1]], &c = m.vertices[f[2]];
  return 0.5 * (b - a).cross(c - a).norm();
}

inline double faceMeasure(const TriMesh<2>& m, const std::array<int, 2>& f) {
  return (m.vertices[f[1]] - m.vertices[f[0]]).norm();
}

}  // namespace detail

/// Validates a solid boundary: indices in range, faces non-degenerate, and a
/// watertight orientable surface (3D: every undirected edge shared by exactly
/// two faces traversing it in opposite directions; 2D: every vertex has
/// exactly one outgoing and one incoming segment).
template <int D>
void validateSolidMesh(const TriMesh<D>& m, double degenerateTol = 1e-12) {
  if (m.faces.empty()) raise(Errc::DegenerateMesh, "mesh has no faces");
  for (const auto& f : m.faces)
    for (int k = 0; k < TriMesh<D>::kFaceSize; ++k)
      if (f[k] < 0 || f[k] >= static_cast<int>(m.vertices.size()))
        raise(Errc::DegenerateMesh, "face index out of range");
  for (const auto& f : m.faces)
    if (detail::faceMeasure(m, f) <= degenerateTol) raise(Errc::DegenerateMesh, "zero-measure face");

  if constexpr (D == 3) {
    // Count directed edges; watertight orientable boundary has each directed
    // edge exactly once and its reverse exactly once.
    std::map<std::pair<int, int>, int> directed;
    for (const auto& f : m.faces)
      for (int k = 0; k < 3; ++k) {
        int u = f[k], v = f[(k + 1) % 3];
        if (u == v) raise(Errc::DegenerateMesh, "repeated vertex in face");
        if (++directed[{u, v}] > 1) raise(Errc::NonWatertight, "directed edge repeated");
      }
    for (const auto& [e, cnt] : directed) {
      auto rev = directed.find({e.second, e.first});
      if (rev == directed.end()) raise(Errc::NonWatertight, "boundary edge without opposite face");
    }
  } else {
    std::map<int, int> outDeg, inDeg;
    for (const auto& f : m.faces) {
      if (f[0] == f[1]) raise(Errc::DegenerateMesh, "zero-length segment");
      if (++outDeg[f[0]] > 1 || ++inDeg[f[1]] > 1)
        raise(Errc::NonWatertight, "vertex shared by more than two segments");
    }
    for (const auto& [v, cnt] : outDeg)
      if (inDeg.find(v) == inDeg.end()) raise(Errc::NonWatertight, "open polyline endpoint");
    for (const auto& [v, cnt] : inDeg)
      if (outDeg.find(v) == outDeg.end()) raise(Errc::NonWatertight, "open polyline endpoint");
  }
}

/// Signed volume (3D) or signed area (2D) of the enclosed solid; positive for
/// outward-oriented boundaries.
template <int D>
double signedMeasure(const TriMesh<D>& m) {
  double s = 0.0;
  if constexpr (D == 3) {
    for (const auto& f : m.faces) {
      const Vec<3>&a = m.vertices[f[0]], &b = m.vertices[f[1]], &c = m.vertices[f[2]];
      s += a.dot(b.cross(c));
    }
    return s / 6.0;
  } else {
    for (const auto& f : m.faces) {
      const Vec<2>&a = m.vertices[f[0]], &b = m.vertices[f[1]];
      s += a.x() * b.y() - b.x() * a.y();
    }
    return s / 2.0;
  }
}

/// Concatenates two boundary meshes (disjoint solids).
template <int D>
TriMesh<D> mergeMeshes(const TriMesh<D>& a, const TriMesh<D>& b) {
  TriMesh<D> out = a;
  const int off = static_cast<int>(a.vertices.size());
  out.vertices.insert(out.vertices.end(), b.vertices.begin(), b.vertices.end());
  for (auto f : b.faces) {
    for (auto& idx : f) idx += off;
    out.faces.push_back(f);
  }
  return out;
}

}  // namespace srp
