#pragma once

#include <algorithm>
#include <vector>

#include "srp/contact.hpp"
#include "srp/features.hpp"
#include "srp/se3.hpp"

namespace srp {

/// Contact fiber of one dislocation feature: every sampled configuration
/// (orientation, representative translation) that grazes the near-net shape
/// within the ε band. Empty ⇔ the feature is inaccessible this round.
template <int D>
struct Fiber {
  int featureId = -1;

  struct Anchor {
    int rotation;        // index into the rotation sample
    Vec<D> translation;  // representative point (tool-tip position)
    double overlap;      // μ value at the anchor, in volume units
  };
  std::vector<Anchor> anchors;       // ordered by (rotation, point index)
  std::vector<int> orientationSet;   // deduplicated rotation indices

  bool empty() const { return anchors.empty(); }

  std::vector<RigidTransform<D>> configurations(const RotationSample<D>& rotations) const {
    std::vector<RigidTransform<D>> out;
    out.reserve(anchors.size());
    for (const auto& a : anchors) out.push_back({rotations.rotations[a.rotation], a.translation});
    return out;
  }
};

namespace detail {

/// Translation-lattice cell of point t in a slice frame; false when off-grid.
template <int D>
bool latticeCell(const GridFrame<D>& frame, const Vec<D>& t, IVec<D>& cell) {
  for (int a = 0; a < D; ++a) {
    const double k = (t[a] - (frame.origin[a] + 0.5 * frame.spacing)) / frame.spacing;
    cell[a] = static_cast<int>(std::llround(k));
    if (cell[a] < 0 || cell[a] >= frame.dims[a]) return false;
  }
  return true;
}

}  // namespace detail

/// Cheap pre-test: a feature can possibly be dislodged iff some representative
/// point sees at least one ε-contact orientation in the projected field.
/// Agrees exactly with fiber non-emptiness over the same sample and points.
template <int D>
bool early_accessibility(const DislocationFeature<D>& feature, const VoxelGrid<D>& projected) {
  for (const auto& p : feature.queryPoints) {
    IVec<D> cell;
    if (!detail::latticeCell(projected.frame, p, cell)) continue;
    if (projected.at(cell) > 0.0) return true;
  }
  return false;
}

/// Fibers for a fixed feature list against a prebuilt contact space:
/// O(1) lookups per (feature point, orientation).
template <int D>
std::vector<Fiber<D>> fibersFromContact(const ContactSpace<D>& contact,
                                        const std::vector<DislocationFeature<D>>& features) {
  std::vector<Fiber<D>> fibers;
  fibers.reserve(features.size());
  for (const auto& feat : features) {
    Fiber<D> fiber;
    fiber.featureId = feat.id;
    for (int s = 0; s < static_cast<int>(contact.slices.size()); ++s) {
      const ContactSlice<D>& slice = contact.slices[static_cast<std::size_t>(s)];
      for (const auto& p : feat.queryPoints) {
        IVec<D> cell;
        if (!detail::latticeCell(slice.frame, p, cell)) continue;
        const auto it = slice.contactLookup.find(slice.frame.linearIndex(cell));
        if (it == slice.contactLookup.end()) continue;
        fiber.anchors.push_back({s, p, static_cast<double>(it->second) *
                                           std::pow(contact.spacing, D)});
      }
    }
    for (const auto& a : fiber.anchors)
      if (fiber.orientationSet.empty() || fiber.orientationSet.back() != a.rotation)
        fiber.orientationSet.push_back(a.rotation);
    fibers.push_back(std::move(fiber));
  }
  return fibers;
}

/// One-call form: features from the P/S interface, contact space from
/// N = P ∪ S, fibers from the intersection.
template <int D>
std::vector<Fiber<D>> fibration(const VoxelGrid<D>& P, const VoxelGrid<D>& S, const Tool<D>& tool,
                                const RotationSample<D>& rotations, double epsVolume,
                                int queryPointsPerFeature = 1,
                                const ContactBuildOptions& options = {}) {
  const auto features = dislocation_features(P, S, queryPointsPerFeature);
  const auto contact = contact_space(gridUnion(P, S), tool, rotations, epsVolume, options);
  return fibersFromContact(contact, features);
}

}  // namespace srp
