#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "srp/core.hpp"
#include "srp/tri_mesh.hpp"
#include "srp/voxel_grid.hpp"

namespace srp {

enum class VoxelizePolicy {
  Centroid,      // cell occupied iff its center lies inside the solid
  Conservative,  // every cell intersecting the solid is occupied (superset)
};

/// Smallest frame whose box covers `box` with `pad` extra cells per side and
/// whose origin lies on the lattice spacing*(Z + latticeOffset) per axis.
/// Scene grids use offset 0; tool grids use offset 1/2 so that tool cell
/// centers land on the scene lattice after correlation.
template <int D>
GridFrame<D> frameCovering(const Box<D>& box, double spacing, int pad, double latticeOffset = 0.0) {
  if (spacing <= 0.0) raise(Errc::ConfigError, "spacing must be positive");
  if (box.isEmpty()) raise(Errc::DegenerateMesh, "empty bounds");
  GridFrame<D> f;
  f.spacing = spacing;
  for (int a = 0; a < D; ++a) {
    const double kLo = std::floor(box.lo[a] / spacing - latticeOffset + 1e-12) - pad;
    f.origin[a] = (kLo + latticeOffset) * spacing;
    const double span = (box.hi[a] - f.origin[a]) / spacing;
    f.dims[a] = static_cast<int>(std::ceil(span - 1e-12)) + pad;
    if (f.dims[a] < 1) f.dims[a] = 1;
  }
  return f;
}

namespace detail {

// Ray offsets keep scan lines off vertices/edges of well-formed inputs.
inline constexpr double kJitterA = 0.7548776662466927;  // frac(plastic constant)
inline constexpr double kJitterB = 0.5698402909980532;  // frac(plastic constant^2)

/// Möller–Trumbore; returns true with the hit parameter if the ray o + s*dir
/// crosses the triangle's interior.
inline bool rayTriangle(const Vec<3>& o, const Vec<3>& dir, const Vec<3>& a, const Vec<3>& b,
                        const Vec<3>& c, double& s) {
  const Vec<3> e1 = b - a, e2 = c - a;
  const Vec<3> p = dir.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-14) return false;
  const double inv = 1.0 / det;
  const Vec<3> tv = o - a;
  const double u = tv.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return false;
  const Vec<3> q = tv.cross(e1);
  const double v = dir.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return false;
  s = e2.dot(q) * inv;
  return true;
}

/// Triangle/axis-aligned-box overlap (separating axis test), box given by
/// center and half extent.
inline bool triBoxOverlap(const Vec<3>& center, const Vec<3>& half, const Vec<3>& ta,
                          const Vec<3>& tb, const Vec<3>& tc) {
  const Vec<3> v0 = ta - center, v1 = tb - center, v2 = tc - center;
  const Vec<3> e0 = v1 - v0, e1 = v2 - v1, e2 = v0 - v2;

  auto axisTest = [&](const Vec<3>& axis) {
    const double p0 = v0.dot(axis), p1 = v1.dot(axis), p2 = v2.dot(axis);
    const double lo = std::min({p0, p1, p2}), hi = std::max({p0, p1, p2});
    const double rad =
        half.x() * std::abs(axis.x()) + half.y() * std::abs(axis.y()) + half.z() * std::abs(axis.z());
    return lo <= rad && hi >= -rad;
  };

  // Box face normals.
  for (int a = 0; a < 3; ++a) {
    const double lo = std::min({v0[a], v1[a], v2[a]}), hi = std::max({v0[a], v1[a], v2[a]});
    if (lo > half[a] || hi < -half[a]) return false;
  }
  // Nine edge cross products.
  const Vec<3> axes[3] = {Vec<3>::UnitX(), Vec<3>::UnitY(), Vec<3>::UnitZ()};
  for (const Vec<3>& e : {e0, e1, e2})
    for (const Vec<3>& u : axes) {
      const Vec<3> axis = e.cross(u);
      if (axis.squaredNorm() < 1e-28) continue;
      if (!axisTest(axis)) return false;
    }
  // Triangle plane.
  const Vec<3> n = e0.cross(e1);
  return axisTest(n);
}

/// Segment/axis-aligned-box overlap in 2D via slab clipping.
inline bool segBoxOverlap(const Vec<2>& center, const Vec<2>& half, const Vec<2>& p,
                          const Vec<2>& q) {
  double t0 = 0.0, t1 = 1.0;
  const Vec<2> d = q - p;
  for (int a = 0; a < 2; ++a) {
    const double lo = center[a] - half[a], hi = center[a] + half[a];
    if (std::abs(d[a]) < 1e-15) {
      if (p[a] < lo || p[a] > hi) return false;
    } else {
      double u = (lo - p[a]) / d[a], v = (hi - p[a]) / d[a];
      if (u > v) std::swap(u, v);
      t0 = std::max(t0, u);
      t1 = std::min(t1, v);
      if (t0 > t1) return false;
    }
  }
  return true;
}

/// Parity fill along +x scan rays through cell centers (even-odd rule).
inline void parityFill(const TriMesh<3>& mesh, VoxelGrid<3>& g) {
  const auto& f = g.frame;
  const double h = f.spacing;
  const double rayX0 = f.origin.x() - h;

  // Bucket triangles by the (iy, iz) rows their AABB spans.
  const Index rows = static_cast<Index>(f.dims[1]) * f.dims[2];
  std::vector<std::vector<int>> rowTris(static_cast<std::size_t>(rows));
  for (int t = 0; t < static_cast<int>(mesh.faces.size()); ++t) {
    const auto& face = mesh.faces[t];
    Box<3> b = Box<3>::empty();
    for (int k = 0; k < 3; ++k) b.expand(mesh.vertices[face[k]]);
    int jLo = std::max(0, static_cast<int>(std::floor((b.lo.y() - f.origin.y()) / h - 0.5)));
    int jHi = std::min(f.dims[1] - 1, static_cast<int>(std::ceil((b.hi.y() - f.origin.y()) / h)));
    int kLo = std::max(0, static_cast<int>(std::floor((b.lo.z() - f.origin.z()) / h - 0.5)));
    int kHi = std::min(f.dims[2] - 1, static_cast<int>(std::ceil((b.hi.z() - f.origin.z()) / h)));
    for (int k = kLo; k <= kHi; ++k)
      for (int j = jLo; j <= jHi; ++j) rowTris[static_cast<std::size_t>(k) * f.dims[1] + j].push_back(t);
  }

  std::vector<double> xs;
  for (int k = 0; k < f.dims[2]; ++k)
    for (int j = 0; j < f.dims[1]; ++j) {
      const auto& tris = rowTris[static_cast<std::size_t>(k) * f.dims[1] + j];
      if (tris.empty()) continue;
      const double cy = f.origin.y() + h * (j + 0.5) + h * 1e-6 * kJitterA;
      const double cz = f.origin.z() + h * (k + 0.5) + h * 1e-6 * kJitterB;
      const Vec<3> o(rayX0, cy, cz);
      xs.clear();
      double s;
      for (int t : tris)
        if (rayTriangle(o, Vec<3>::UnitX(), mesh.vertices[mesh.faces[t][0]],
                        mesh.vertices[mesh.faces[t][1]], mesh.vertices[mesh.faces[t][2]], s))
          xs.push_back(rayX0 + s);
      if (xs.empty()) continue;
      std::sort(xs.begin(), xs.end());
      for (int i = 0; i < f.dims[0]; ++i) {
        const double cx = f.origin.x() + h * (i + 0.5);
        const auto cnt = std::upper_bound(xs.begin(), xs.end(), cx) - xs.begin();
        if (cnt & 1) g.at(IVec<3>(i, j, k)) = 1.0;
      }
    }
}

inline void parityFill(const TriMesh<2>& mesh, VoxelGrid<2>& g) {
  const auto& f = g.frame;
  const double h = f.spacing;
  std::vector<double> xs;
  for (int j = 0; j < f.dims[1]; ++j) {
    const double cy = f.origin.y() + h * (j + 0.5) + h * 1e-6 * kJitterA;
    xs.clear();
    for (const auto& seg : mesh.faces) {
      const Vec<2>&p = mesh.vertices[seg[0]], &q = mesh.vertices[seg[1]];
      if ((p.y() > cy) == (q.y() > cy)) continue;
      xs.push_back(p.x() + (cy - p.y()) / (q.y() - p.y()) * (q.x() - p.x()));
    }
    if (xs.empty()) continue;
    std::sort(xs.begin(), xs.end());
    for (int i = 0; i < f.dims[0]; ++i) {
      const double cx = f.origin.x() + h * (i + 0.5);
      const auto cnt = std::upper_bound(xs.begin(), xs.end(), cx) - xs.begin();
      if (cnt & 1) g.at(IVec<2>(i, j)) = 1.0;
    }
  }
}

/// Marks every cell whose box touches a boundary face. Together with the
/// parity interior this is exactly the set of cells intersecting the solid.
inline void markBoundaryCells(const TriMesh<3>& mesh, VoxelGrid<3>& g) {
  const auto& f = g.frame;
  const double h = f.spacing;
  const Vec<3> half = Vec<3>::Constant(0.5 * h);
  for (const auto& face : mesh.faces) {
    const Vec<3>&a = mesh.vertices[face[0]], &b = mesh.vertices[face[1]], &c = mesh.vertices[face[2]];
    Box<3> bb = Box<3>::empty();
    bb.expand(a);
    bb.expand(b);
    bb.expand(c);
    IVec<3> lo = f.cellOf(bb.lo).max(0);
    IVec<3> hi = f.cellOf(bb.hi).min(f.dims - 1);
    for (int k = lo[2]; k <= hi[2]; ++k)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int i = lo[0]; i <= hi[0]; ++i) {
          const IVec<3> cell(i, j, k);
          if (g.occupied(cell)) continue;
          if (triBoxOverlap(f.cellCenter(cell), half, a, b, c)) g.at(cell) = 1.0;
        }
  }
}

inline void markBoundaryCells(const TriMesh<2>& mesh, VoxelGrid<2>& g) {
  const auto& f = g.frame;
  const Vec<2> half = Vec<2>::Constant(0.5 * f.spacing);
  for (const auto& seg : mesh.faces) {
    const Vec<2>&p = mesh.vertices[seg[0]], &q = mesh.vertices[seg[1]];
    Box<2> bb = Box<2>::empty();
    bb.expand(p);
    bb.expand(q);
    IVec<2> lo = f.cellOf(bb.lo).max(0);
    IVec<2> hi = f.cellOf(bb.hi).min(f.dims - 1);
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) {
        const IVec<2> cell(i, j);
        if (g.occupied(cell)) continue;
        if (segBoxOverlap(f.cellCenter(cell), half, p, q)) g.at(cell) = 1.0;
      }
  }
}

}  // namespace detail

/// Rasterizes a validated solid boundary into the given frame.
template <int D>
VoxelGrid<D> voxelizeInto(const TriMesh<D>& mesh, const GridFrame<D>& frame, VoxelizePolicy policy) {
  validateSolidMesh(mesh);
  VoxelGrid<D> g(frame);
  detail::parityFill(mesh, g);
  if (policy == VoxelizePolicy::Conservative) detail::markBoundaryCells(mesh, g);
  return g;
}

/// Rasterizes on a self-chosen frame: AABB padded by one cell, origin on the
/// spacing*Z lattice.
template <int D>
VoxelGrid<D> voxelize(const TriMesh<D>& mesh, double spacing, VoxelizePolicy policy) {
  validateSolidMesh(mesh);
  return voxelizeInto(mesh, frameCovering(mesh.bounds(), spacing, 1), policy);
}

}  // namespace srp
