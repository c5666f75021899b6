#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

#include "srp/core.hpp"

namespace srp {

/// Placement of a regular grid in space. `origin` is the lower corner of cell
/// (0,...,0); the center of cell i sits at origin + spacing*(i + 1/2).
/// Linear storage is x-fastest: lin = i0 + dims0*(i1 + dims1*i2).
template <int D>
struct GridFrame {
  Vec<D> origin{Vec<D>::Zero()};
  double spacing{1.0};
  IVec<D> dims{IVec<D>::Constant(1)};

  Index cellCount() const {
    Index n = 1;
    for (int a = 0; a < D; ++a) n *= dims[a];
    return n;
  }

  Index linearIndex(const IVec<D>& i) const {
    Index lin = i[D - 1];
    for (int a = D - 2; a >= 0; --a) lin = lin * dims[a] + i[a];
    return lin;
  }

  IVec<D> cellAt(Index lin) const {
    IVec<D> i;
    for (int a = 0; a < D; ++a) {
      i[a] = static_cast<int>(lin % dims[a]);
      lin /= dims[a];
    }
    return i;
  }

  bool inBounds(const IVec<D>& i) const {
    return (i >= 0).all() && (i < dims).all();
  }

  Vec<D> cellCenter(const IVec<D>& i) const {
    return origin + spacing * (i.template cast<double>() + 0.5).matrix();
  }

  /// Cell containing a point (floor semantics; call inBounds afterwards).
  IVec<D> cellOf(const Vec<D>& p) const {
    IVec<D> i;
    for (int a = 0; a < D; ++a) i[a] = static_cast<int>(std::floor((p[a] - origin[a]) / spacing));
    return i;
  }

  Box<D> bounds() const {
    Box<D> b;
    b.lo = origin;
    b.hi = origin + spacing * dims.template cast<double>().matrix();
    return b;
  }

  bool operator==(const GridFrame& o) const {
    return spacing == o.spacing && (dims == o.dims).all() && origin == o.origin;
  }

  /// True when the two frames sample the same lattice (equal spacing, origins
  /// differing by an integer number of cells up to `tol` cells).
  bool sameLattice(const GridFrame& o, double tol = 1e-9) const {
    if (std::abs(spacing - o.spacing) > tol * spacing) return false;
    for (int a = 0; a < D; ++a) {
      double k = (o.origin[a] - origin[a]) / spacing;
      if (std::abs(k - std::round(k)) > tol) return false;
    }
    return true;
  }
};

/// Dense scalar field over a GridFrame. Binary occupancy stores {0,1}.
template <int D>
struct VoxelGrid {
  GridFrame<D> frame;
  Eigen::ArrayXd values;

  VoxelGrid() = default;
  explicit VoxelGrid(const GridFrame<D>& f) : frame(f), values(Eigen::ArrayXd::Zero(f.cellCount())) {}

  double& at(const IVec<D>& i) { return values[frame.linearIndex(i)]; }
  double at(const IVec<D>& i) const { return values[frame.linearIndex(i)]; }
  bool occupied(const IVec<D>& i) const { return values[frame.linearIndex(i)] != 0.0; }

  Index occupiedCount() const { return (values != 0.0).count(); }
  double volume() const { return static_cast<double>(occupiedCount()) * std::pow(frame.spacing, D); }
  bool isBinary() const { return ((values == 0.0) || (values == 1.0)).all(); }
  bool empty() const { return (values == 0.0).all(); }

  /// Occupied cell indices in increasing linear-index order.
  std::vector<IVec<D>> occupiedCells() const {
    std::vector<IVec<D>> out;
    out.reserve(static_cast<std::size_t>(occupiedCount()));
    const Index n = frame.cellCount();
    for (Index lin = 0; lin < n; ++lin)
      if (values[lin] != 0.0) out.push_back(frame.cellAt(lin));
    return out;
  }
};

namespace detail {
template <int D>
void requireSameFrame(const VoxelGrid<D>& a, const VoxelGrid<D>& b, const char* op) {
  if (!(a.frame == b.frame)) raise(Errc::FrameMismatch, std::string(op) + ": grids on different frames");
}
}  // namespace detail

/// occupied(result) = occupied(a) \ occupied(b).
template <int D>
VoxelGrid<D> subtract(const VoxelGrid<D>& a, const VoxelGrid<D>& b) {
  detail::requireSameFrame(a, b, "subtract");
  VoxelGrid<D> out(a.frame);
  out.values = ((a.values != 0.0) && (b.values == 0.0)).template cast<double>();
  return out;
}

template <int D>
VoxelGrid<D> gridUnion(const VoxelGrid<D>& a, const VoxelGrid<D>& b) {
  detail::requireSameFrame(a, b, "union");
  VoxelGrid<D> out(a.frame);
  out.values = ((a.values != 0.0) || (b.values != 0.0)).template cast<double>();
  return out;
}

template <int D>
VoxelGrid<D> gridIntersection(const VoxelGrid<D>& a, const VoxelGrid<D>& b) {
  detail::requireSameFrame(a, b, "intersection");
  VoxelGrid<D> out(a.frame);
  out.values = ((a.values != 0.0) && (b.values != 0.0)).template cast<double>();
  return out;
}

/// Morphological dilation of a binary grid by `r` cells (Chebyshev ball),
/// clamped to the frame. Used by the planner's inflation option.
template <int D>
VoxelGrid<D> dilate(const VoxelGrid<D>& g, int r) {
  if (r <= 0) return g;
  VoxelGrid<D> out(g.frame);
  const Index n = g.frame.cellCount();
  for (Index lin = 0; lin < n; ++lin) {
    if (g.values[lin] == 0.0) continue;
    const IVec<D> c = g.frame.cellAt(lin);
    IVec<D> lo = (c - r).max(0);
    IVec<D> hi = (c + r).min(g.frame.dims - 1);
    IVec<D> i = lo;
    while (true) {
      out.values[g.frame.linearIndex(i)] = 1.0;
      int a = 0;
      for (; a < D; ++a) {
        if (++i[a] <= hi[a]) break;
        i[a] = lo[a];
      }
      if (a == D) break;
    }
  }
  return out;
}

}  // namespace srp
