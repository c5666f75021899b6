#pragma once

#include <cmath>
#include <vector>

#include "srp/core.hpp"
#include "srp/fft.hpp"
#include "srp/se3.hpp"
#include "srp/voxel_grid.hpp"
#include "srp/voxelize.hpp"

namespace srp {

/// Milling/cutting tool: boundary mesh positioned so the tool-tip reference
/// point sits at the origin.
template <int D>
struct Tool {
  TriMesh<D> mesh;
  VoxelizePolicy policy = VoxelizePolicy::Conservative;
};

/// Tool rotated about its tip and rasterized on the half-offset lattice, so
/// that every feasible translation lands exactly on scene cell centers.
template <int D>
VoxelGrid<D> rotatedToolGrid(const Tool<D>& tool, const Rotation<D>& r, double spacing) {
  TriMesh<D> rotated = tool.mesh;
  for (auto& v : rotated.vertices) v = r.apply(v);
  return voxelizeInto(rotated, frameCovering(rotated.bounds(), spacing, 1, 0.5), tool.policy);
}

/// Translational overlap-volume slice at one orientation. `mu` lives on the
/// translation lattice: the value at cell k is the intersection volume when
/// the rotated tool is shifted by the cell's center.
template <int D>
struct OverlapField {
  Rotation<D> orientation;
  int rotationIndex = -1;  // position in the driving RotationSample, -1 if free-standing
  VoxelGrid<D> mu;         // snapped to integer voxel counts, scaled by spacing^D

  long long countAt(Index lin) const {
    return static_cast<long long>(std::llround(mu.values[lin] / std::pow(mu.frame.spacing, D)));
  }
};

enum class Classification { Free, Contact, Collide };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::Free: return "Free";
    case Classification::Contact: return "Contact";
    case Classification::Collide: return "Collide";
  }
  return "?";
}

/// Memory guard for padded FFT buffers (complex doubles per cell).
struct FftBudget {
  Index maxCells = Index(1) << 26;
};

namespace detail {

/// Frame of the full cross-correlation: one cell per translation lattice
/// point t = (oN - oT) + spacing*k with k ∈ [-(nT-1), nN-1] per axis.
template <int D>
GridFrame<D> correlationFrame(const GridFrame<D>& N, const GridFrame<D>& T) {
  GridFrame<D> f;
  f.spacing = N.spacing;
  f.dims = N.dims + T.dims - 1;
  // First translation is k = -(nT - 1); lower corner sits half a cell below it.
  f.origin = N.origin - T.origin - N.spacing * (T.dims.template cast<double>() - 0.5).matrix();
  return f;
}

}  // namespace detail

/// Overlap counts for every translation at once: zero-padded FFT
/// cross-correlation of the two indicator grids, snapped to integers.
/// Accepts any two grids of equal spacing; the result's lattice is
/// determined by the two origins.
template <int D>
OverlapField<D> overlapFieldGrids(const VoxelGrid<D>& N, const VoxelGrid<D>& Tr,
                                  const FftBudget& budget = {}) {
  if (std::abs(N.frame.spacing - Tr.frame.spacing) > 1e-12 * N.frame.spacing)
    raise(Errc::FrameMismatch, "overlap_field requires equal spacing");

  const GridFrame<D> out = detail::correlationFrame(N.frame, Tr.frame);
  IVec<D> padded;
  Index padCells = 1;
  for (int a = 0; a < D; ++a) {
    padded[a] = static_cast<int>(fft::niceSize(out.dims[a]));
    padCells *= padded[a];
  }
  if (padCells > budget.maxCells)
    raise(Errc::GridTooLarge, "padded FFT of " + std::to_string(padCells) + " cells exceeds budget");

  auto specN = fft::paddedSpectrum<D>(N.frame.dims, N.values.data(), padded);
  const auto specT = fft::paddedSpectrum<D>(Tr.frame.dims, Tr.values.data(), padded);
  // Correlation theorem: c(k) = Σ_j N(j + k)·T(j)  ⇔  Ĉ = N̂ · conj(T̂).
  for (std::size_t i = 0; i < specN.size(); ++i) specN[i] *= std::conj(specT[i]);
  fft::transform<D>(padded, specN, true);

  OverlapField<D> field;
  field.orientation = Rotation<D>::identity();
  field.mu = VoxelGrid<D>(out);
  const double cellVol = std::pow(out.spacing, D);
  const Index n = out.cellCount();
  for (Index lin = 0; lin < n; ++lin) {
    // Output index u ↦ shift k = u - (nT - 1), wrapped into the padded box.
    Index rest = lin, plin = 0, stride = 1;
    for (int a = 0; a < D; ++a) {
      const Index u = rest % out.dims[a];
      rest /= out.dims[a];
      Index k = u - (Tr.frame.dims[a] - 1);
      if (k < 0) k += padded[a];
      plin += k * stride;
      stride *= padded[a];
    }
    const auto cnt = std::llround(specN[plin].real());
    field.mu.values[lin] = (cnt <= 0) ? 0.0 : static_cast<double>(cnt) * cellVol;
  }
  return field;
}

/// Overlap slice at orientation r: the tool's source mesh is rotated about
/// its tip and re-rasterized, then correlated against the scene indicator.
template <int D>
OverlapField<D> overlap_field(const VoxelGrid<D>& N, const Tool<D>& tool, const Rotation<D>& r,
                              const FftBudget& budget = {}) {
  OverlapField<D> field = overlapFieldGrids(N, rotatedToolGrid(tool, r, N.frame.spacing), budget);
  field.orientation = r;
  return field;
}

/// Rasterized interference count at one exact pose: the tool mesh is moved by
/// tau, rasterized per its policy onto a frame aligned with N's lattice, and
/// the occupied-cell overlaps are counted. Replays a classification at any
/// resolution without building a full field and without snapping the pose.
template <int D>
long long overlap_count(const VoxelGrid<D>& N, const Tool<D>& tool, const RigidTransform<D>& tau) {
  TriMesh<D> moved = tool.mesh;
  for (auto& v : moved.vertices) v = tau.apply(v);
  const Box<D> b = moved.bounds();
  const double h = N.frame.spacing;

  GridFrame<D> f;
  f.spacing = h;
  IVec<D> shift;  // f's cell (0,…) sits at N cell `shift`
  for (int a = 0; a < D; ++a) {
    shift[a] = static_cast<int>(std::floor((b.lo[a] - N.frame.origin[a]) / h)) - 1;
    const int top = static_cast<int>(std::floor((b.hi[a] - N.frame.origin[a]) / h)) + 1;
    f.dims[a] = top - shift[a] + 1;
    f.origin[a] = N.frame.origin[a] + shift[a] * h;
  }
  const VoxelGrid<D> t = voxelizeInto(moved, f, tool.policy);

  long long count = 0;
  const Index n = f.cellCount();
  for (Index lin = 0; lin < n; ++lin) {
    if (t.values[lin] == 0.0) continue;
    const IVec<D> c = f.cellAt(lin) + shift;
    bool in = true;
    for (int a = 0; a < D; ++a)
      if (c[a] < 0 || c[a] >= N.frame.dims[a]) in = false;
    if (in && N.occupied(c)) ++count;
  }
  return count;
}

/// Contacts thinner than one voxel cannot be represented; ε counts voxels.
inline long long epsilonCount(double epsVolume, double spacing, int dim) {
  return static_cast<long long>(std::llround(epsVolume / std::pow(spacing, dim)));
}

template <int D>
Classification classifyCount(long long count, long long epsCount) {
  if (count <= 0) return Classification::Free;
  return (count < epsCount) ? Classification::Contact : Classification::Collide;
}

/// Classification of a configuration against a stack of per-orientation
/// slices. The rotation resolves to the nearest slice (exact for sampled
/// rotations; `approximate` reports a geodesic gap above tolerance). The
/// translation snaps to the field lattice; translations off the stored field
/// are Free only when the slice shows no possible overlap there.
template <int D>
struct ClassifyResult {
  Classification state = Classification::Free;
  int rotationIndex = -1;
  bool approximate = false;  // rotation was not one of the sampled slices
  long long count = 0;
};

template <int D>
ClassifyResult<D> classify(const std::vector<OverlapField<D>>& stack, const RigidTransform<D>& tau,
                           double epsVolume, double rotationTol = 1e-9) {
  if (stack.empty()) raise(Errc::ConfigError, "classify on empty field stack");
  ClassifyResult<D> res;
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < static_cast<int>(stack.size()); ++s) {
    double gap;
    if constexpr (D == 3)
      gap = stack[s].orientation.inverse().compose(tau.r).logVector().norm();
    else
      gap = std::abs(stack[s].orientation.inverse().compose(tau.r).logAngle());
    if (gap < best) {
      best = gap;
      res.rotationIndex = s;
    }
  }
  res.approximate = best > rotationTol;

  const OverlapField<D>& field = stack[res.rotationIndex];
  const GridFrame<D>& f = field.mu.frame;
  IVec<D> cell;
  bool inside = true;
  for (int a = 0; a < D; ++a) {
    const double k = (tau.t[a] - (f.origin[a] + 0.5 * f.spacing)) / f.spacing;
    cell[a] = static_cast<int>(std::llround(k));
    if (cell[a] < 0 || cell[a] >= f.dims[a]) inside = false;
  }
  if (!inside) {
    // The slice covers every translation with overlapping AABBs, so outside
    // the slice the tool is provably disjoint from the scene.
    res.state = Classification::Free;
    res.count = 0;
    return res;
  }
  res.count = field.countAt(f.linearIndex(cell));
  res.state = classifyCount<D>(res.count, epsilonCount(epsVolume, f.spacing, D));
  return res;
}

}  // namespace srp
