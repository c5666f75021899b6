#pragma once

#include <optional>

#include "srp/core.hpp"
#include "srp/overlap.hpp"
#include "srp/tri_mesh.hpp"
#include "srp/voxel_grid.hpp"
#include "srp/voxelize.hpp"

namespace srp {

/// The build-chamber state handed to the planner: part P, support S, cutting
/// tool T (tip re-centered at its origin), optional base plate B. All grids
/// share one frame; S is regularized against P so interiors are disjoint.
template <int D>
struct Scene {
  TriMesh<D> partMesh;
  TriMesh<D> supportMesh;
  VoxelGrid<D> part;
  VoxelGrid<D> support;
  std::optional<VoxelGrid<D>> basePlate;
  Tool<D> tool;       // mesh already shifted so the tip is at the origin
  Vec<D> toolTip;     // tip point in the tool mesh's input coordinates
  double spacing = 1.0;

  /// Near-net shape for a given remaining support: P ∪ S_remaining (∪ B as a
  /// pure obstacle).
  VoxelGrid<D> nearNet(const VoxelGrid<D>& remainingSupport) const {
    VoxelGrid<D> n = gridUnion(part, remainingSupport);
    if (basePlate) n = gridUnion(n, *basePlate);
    return n;
  }
};

template <int D>
struct SceneBuildParams {
  double spacing = 1.0;
  VoxelizePolicy scenePolicy = VoxelizePolicy::Conservative;
  VoxelizePolicy toolPolicy = VoxelizePolicy::Conservative;
  Vec<D> toolTip = Vec<D>::Zero();  // in tool-mesh coordinates
  int framePad = 1;
};

namespace detail {

inline double pointSegmentDistance(const Vec<2>& p, const Vec<2>& a, const Vec<2>& b) {
  const Vec<2> ab = b - a;
  const double t = std::clamp(ab.dot(p - a) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

inline double pointTriangleDistance(const Vec<3>& p, const Vec<3>& a, const Vec<3>& b,
                                    const Vec<3>& c) {
  // Project onto the plane, fall back to edge distances when outside.
  const Vec<3> ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return ap.norm();
  const Vec<3> bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return bp.norm();
  const Vec<3> cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return cp.norm();
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return (ap - d1 / (d1 - d3) * ab).norm();
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return (ap - d2 / (d2 - d6) * ac).norm();
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    const double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return (p - (b + t * (c - b))).norm();
  }
  const double denom = 1.0 / (va + vb + vc);
  return (p - (a + (vb * denom) * ab + (vc * denom) * ac)).norm();
}

template <int D>
double pointSurfaceDistance(const Vec<D>& p, const TriMesh<D>& mesh) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : mesh.faces) {
    double d;
    if constexpr (D == 3)
      d = pointTriangleDistance(p, mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
    else
      d = pointSegmentDistance(p, mesh.vertices[f[0]], mesh.vertices[f[1]]);
    best = std::min(best, d);
  }
  return best;
}

}  // namespace detail

/// Builds the shared-frame scene: one frame covering part ∪ support (∪ base),
/// support regularized to S \ P, tool re-centered on its tip (which must lie
/// on the tool surface within one cell).
template <int D>
Scene<D> buildScene(const TriMesh<D>& partMesh, const TriMesh<D>& supportMesh,
                    const TriMesh<D>& toolMesh, const SceneBuildParams<D>& params,
                    const std::optional<TriMesh<D>>& baseMesh = std::nullopt) {
  validateSolidMesh(partMesh);
  if (!supportMesh.faces.empty()) validateSolidMesh(supportMesh);  // S = ∅ is a valid job
  validateSolidMesh(toolMesh);

  Scene<D> scene;
  scene.spacing = params.spacing;
  scene.partMesh = partMesh;
  scene.supportMesh = supportMesh;
  scene.toolTip = params.toolTip;

  Box<D> box = partMesh.bounds();
  if (!supportMesh.faces.empty()) box.expand(supportMesh.bounds());
  if (baseMesh) box.expand(baseMesh->bounds());
  const GridFrame<D> frame = frameCovering(box, params.spacing, params.framePad, 0.0);

  scene.part = voxelizeInto(partMesh, frame, params.scenePolicy);
  scene.support = supportMesh.faces.empty()
                      ? VoxelGrid<D>(frame)
                      : subtract(voxelizeInto(supportMesh, frame, params.scenePolicy), scene.part);
  if (baseMesh) {
    scene.basePlate = voxelizeInto(*baseMesh, frame, params.scenePolicy);
    scene.basePlate = subtract(*scene.basePlate, scene.part);
  }

  const double tipGap = detail::pointSurfaceDistance(params.toolTip, toolMesh);
  if (tipGap > params.spacing)
    raise(Errc::ConfigError,
          "tool tip is " + std::to_string(tipGap) + " mm off the tool surface (> one cell)");
  scene.tool.mesh = toolMesh.translated(-params.toolTip);
  scene.tool.policy = params.toolPolicy;
  return scene;
}

}  // namespace srp
