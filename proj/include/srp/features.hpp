#pragma once

#include <limits>
#include <vector>

#include "srp/components.hpp"
#include "srp/core.hpp"
#include "srp/voxel_grid.hpp"

namespace srp {

/// Connected piece of the support set.
template <int D>
struct SupportComponent {
  int id = -1;
  VoxelGrid<D> voxels;
  std::vector<int> featureIds;  // dislocation features owned by this component
};

/// Connected patch of support voxels in face contact with the part — the
/// region a tool must reach to dislodge the owning component.
template <int D>
struct DislocationFeature {
  int id = -1;
  int component = -1;
  VoxelGrid<D> voxels;
  std::vector<Vec<D>> queryPoints;  // representative points, on cell centers
};

namespace detail {

template <int D>
std::vector<IVec<D>> faceOffsets() {
  std::vector<IVec<D>> offs;
  for (int a = 0; a < D; ++a)
    for (int s : {-1, 1}) {
      IVec<D> o = IVec<D>::Zero();
      o[a] = s;
      offs.push_back(o);
    }
  return offs;
}

/// Representative points: feature centroid snapped to the nearest member cell
/// center, then up to k-1 farthest-point samples for spatial spread.
template <int D>
std::vector<Vec<D>> representativePoints(const VoxelGrid<D>& feature, int k) {
  const auto cells = feature.occupiedCells();
  Vec<D> centroid = Vec<D>::Zero();
  for (const auto& c : cells) centroid += feature.frame.cellCenter(c);
  centroid /= static_cast<double>(cells.size());

  std::vector<Vec<D>> pts;
  auto nearestTo = [&](const Vec<D>& target) {
    double best = std::numeric_limits<double>::infinity();
    Vec<D> bestP = feature.frame.cellCenter(cells.front());
    for (const auto& c : cells) {
      const Vec<D> p = feature.frame.cellCenter(c);
      const double d = (p - target).squaredNorm();
      if (d < best) {
        best = d;
        bestP = p;
      }
    }
    return bestP;
  };
  pts.push_back(nearestTo(centroid));
  while (static_cast<int>(pts.size()) < k && pts.size() < cells.size()) {
    double best = -1.0;
    Vec<D> bestP = pts.front();
    for (const auto& c : cells) {
      const Vec<D> p = feature.frame.cellCenter(c);
      double dmin = std::numeric_limits<double>::infinity();
      for (const auto& q : pts) dmin = std::min(dmin, (p - q).squaredNorm());
      if (dmin > best + 1e-15) {
        best = dmin;
        bestP = p;
      }
    }
    if (best <= 1e-15) break;  // all member cells already chosen
    pts.push_back(bestP);
  }
  return pts;
}

}  // namespace detail

/// Connected patches of {s occupied in S : s face-adjacent to occupied P},
/// labeled with their owning support component (full connectivity on S, face
/// connectivity on the interface set). Ordering follows the component-label
/// convention. Components with no part contact produce no features; `rounds`
/// reports them as NoContact.
template <int D>
std::vector<DislocationFeature<D>> dislocation_features(const VoxelGrid<D>& P,
                                                        const VoxelGrid<D>& S,
                                                        int queryPointsPerFeature = 1) {
  detail::requireSameFrame(P, S, "dislocation_features");
  const auto offs = detail::faceOffsets<D>();

  VoxelGrid<D> interface(S.frame);
  const Index n = S.frame.cellCount();
  for (Index lin = 0; lin < n; ++lin) {
    if (S.values[lin] == 0.0) continue;
    const IVec<D> c = S.frame.cellAt(lin);
    for (const auto& o : offs) {
      const IVec<D> nb = c + o;
      if (!S.frame.inBounds(nb)) continue;
      if (P.occupied(nb)) {
        interface.values[lin] = 1.0;
        break;
      }
    }
  }

  const ComponentLabels<D> supportLabels = labelComponents(S, Connectivity::Full);
  auto patches = connected_components(interface, Connectivity::Face);

  std::vector<DislocationFeature<D>> feats;
  feats.reserve(patches.size());
  for (int j = 0; j < static_cast<int>(patches.size()); ++j) {
    DislocationFeature<D> f;
    f.id = j;
    f.voxels = std::move(patches[j]);
    for (Index lin = 0; lin < n; ++lin)
      if (f.voxels.values[lin] != 0.0) {
        f.component = supportLabels.label[lin];
        break;
      }
    f.queryPoints = detail::representativePoints(f.voxels, queryPointsPerFeature);
    feats.push_back(std::move(f));
  }
  return feats;
}

/// Support components bundled with the features they own.
template <int D>
std::vector<SupportComponent<D>> supportComponents(const VoxelGrid<D>& S,
                                                   const std::vector<DislocationFeature<D>>& feats) {
  auto comps = connected_components(S, Connectivity::Full);
  std::vector<SupportComponent<D>> out(comps.size());
  for (int i = 0; i < static_cast<int>(comps.size()); ++i) {
    out[i].id = i;
    out[i].voxels = std::move(comps[i]);
  }
  for (const auto& f : feats)
    if (f.component >= 0 && f.component < static_cast<int>(out.size()))
      out[f.component].featureIds.push_back(f.id);
  return out;
}

}  // namespace srp
