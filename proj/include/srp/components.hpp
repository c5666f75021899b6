#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <vector>

#include "srp/core.hpp"
#include "srp/voxel_grid.hpp"

namespace srp {

enum class Connectivity {
  Face,  // 6-neighborhood in 3D, 4 in 2D
  Full,  // 26-neighborhood in 3D, 8 in 2D
};

namespace detail {

/// Neighbor offsets with negative linear-index delta (already-scanned side).
template <int D>
std::vector<IVec<D>> backwardOffsets(Connectivity conn) {
  std::vector<IVec<D>> offs;
  IVec<D> o = IVec<D>::Constant(-1);
  while (true) {
    bool nonzero = (o != 0).any();
    if (nonzero) {
      // Linear delta sign = sign of the most significant (last-axis) nonzero.
      int msb = D - 1;
      while (o[msb] == 0) --msb;
      const bool backward = o[msb] < 0;
      const int manhattan = o.abs().sum();
      const bool wanted = (conn == Connectivity::Face) ? (manhattan == 1) : true;
      if (backward && wanted) offs.push_back(o);
    }
    int a = 0;
    for (; a < D; ++a) {
      if (++o[a] <= 1) break;
      o[a] = -1;
    }
    if (a == D) break;
  }
  return offs;
}

struct UnionFind {
  std::vector<Index> parent;
  Index make() {
    parent.push_back(static_cast<Index>(parent.size()));
    return parent.back();
  }
  Index find(Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace detail

/// Dense component labels: -1 for empty cells, 0..count-1 for occupied cells.
/// Labels are ordered by each component's lexicographically smallest voxel
/// index (x, then y, then z).
template <int D>
struct ComponentLabels {
  std::vector<int> label;  // per linear cell index
  int count = 0;
};

template <int D>
ComponentLabels<D> labelComponents(const VoxelGrid<D>& g, Connectivity conn) {
  const auto offs = detail::backwardOffsets<D>(conn);
  const Index n = g.frame.cellCount();

  std::vector<Index> root(static_cast<std::size_t>(n), -1);
  detail::UnionFind uf;
  for (Index lin = 0; lin < n; ++lin) {
    if (g.values[lin] == 0.0) continue;
    const IVec<D> c = g.frame.cellAt(lin);
    Index id = -1;
    for (const auto& o : offs) {
      const IVec<D> nb = c + o;
      if (!g.frame.inBounds(nb)) continue;
      const Index nlin = g.frame.linearIndex(nb);
      if (root[nlin] < 0) continue;
      if (id < 0)
        id = uf.find(root[nlin]);
      else
        uf.unite(id, root[nlin]);
    }
    root[lin] = (id >= 0) ? id : uf.make();
  }

  // Collapse union-find roots to labels ordered by lexicographic minimum cell.
  struct Rep {
    Index rootId;
    std::array<int, D> minCell;
  };
  std::vector<Rep> reps;
  std::vector<int> rootToRep(uf.parent.size(), -1);
  for (Index lin = 0; lin < n; ++lin) {
    if (root[lin] < 0) continue;
    const Index r = uf.find(root[lin]);
    const IVec<D> c = g.frame.cellAt(lin);
    std::array<int, D> key;
    for (int a = 0; a < D; ++a) key[a] = c[a];
    if (rootToRep[r] < 0) {
      rootToRep[r] = static_cast<int>(reps.size());
      reps.push_back({r, key});
    } else if (key < reps[rootToRep[r]].minCell) {
      reps[rootToRep[r]].minCell = key;
    }
  }
  std::vector<int> order(reps.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return reps[a].minCell < reps[b].minCell; });
  std::vector<int> repToLabel(reps.size());
  for (int k = 0; k < static_cast<int>(order.size()); ++k) repToLabel[order[k]] = k;

  ComponentLabels<D> out;
  out.count = static_cast<int>(reps.size());
  out.label.assign(static_cast<std::size_t>(n), -1);
  for (Index lin = 0; lin < n; ++lin)
    if (root[lin] >= 0) out.label[lin] = repToLabel[rootToRep[uf.find(root[lin])]];
  return out;
}

/// Maximal connected subsets of the occupied set, one binary grid each (all on
/// the input frame), ordered by lexicographic minimum voxel index.
template <int D>
std::vector<VoxelGrid<D>> connected_components(const VoxelGrid<D>& g, Connectivity conn) {
  const ComponentLabels<D> labels = labelComponents(g, conn);
  std::vector<VoxelGrid<D>> comps(static_cast<std::size_t>(labels.count), VoxelGrid<D>(g.frame));
  const Index n = g.frame.cellCount();
  for (Index lin = 0; lin < n; ++lin)
    if (labels.label[lin] >= 0) comps[labels.label[lin]].values[lin] = 1.0;
  return comps;
}

}  // namespace srp
