#pragma once

#include <map>
#include <vector>

#include "srp/fibration.hpp"
#include "srp/scene.hpp"

namespace srp {

enum class RemovalStatus { AllRemoved, Unreachable };

inline const char* to_string(RemovalStatus s) {
  return s == RemovalStatus::AllRemoved ? "AllRemoved" : "Unreachable";
}

/// One iteration of the peel: which components came off and the evidence.
template <int D>
struct RoundResult {
  int round = 0;
  std::vector<int> removed;             // component ids I^t, ascending
  std::vector<int> noContactComponents; // removed vacuously (no features), flagged
  std::vector<int> activeFeatures;      // feature ids surveyed this round
  std::vector<Fiber<D>> fibers;         // fibers of the active features, same order
  VoxelGrid<D> nearNet;                 // N^t
  VoxelGrid<D> support;                 // S^t

  const Fiber<D>* fiberFor(int featureId) const {
    for (std::size_t k = 0; k < activeFeatures.size(); ++k)
      if (activeFeatures[k] == featureId) return &fibers[k];
    return nullptr;
  }
};

template <int D>
struct PlanOutcome {
  RemovalStatus status = RemovalStatus::AllRemoved;
  std::vector<RoundResult<D>> rounds;
  std::vector<int> remainingComponents;             // nonempty iff Unreachable
  std::map<int, std::vector<int>> blockingFeatures; // component id → empty-fiber feature ids

  // Feature/component census of the original scene, for downstream reporting.
  std::vector<SupportComponent<D>> components;
  std::vector<DislocationFeature<D>> features;
};

template <int D>
struct RoundsOptions {
  int queryPointsPerFeature = 1;
  ContactBuildOptions contact;
};

/// The recursive outer loop: each round recomputes the ε-contact space of the
/// current near-net shape, lifts the surviving features, removes every
/// component whose features are all accessible, and recurses on the rest.
/// Termination: AllRemoved when S^t is empty; Unreachable when a round makes
/// no progress (with the blockers identified).
template <int D>
PlanOutcome<D> removable_rounds(const Scene<D>& scene, const RotationSample<D>& rotations,
                                double epsVolume, const RoundsOptions<D>& options = {}) {
  PlanOutcome<D> outcome;
  outcome.features = dislocation_features(scene.part, scene.support, options.queryPointsPerFeature);
  outcome.components = supportComponents(scene.support, outcome.features);

  VoxelGrid<D> remaining = scene.support;
  std::vector<bool> active(outcome.components.size(), true);

  for (int t = 0;; ++t) {
    if (remaining.empty()) {
      outcome.status = RemovalStatus::AllRemoved;
      return outcome;
    }

    RoundResult<D> round;
    round.round = t;
    round.support = remaining;
    round.nearNet = scene.nearNet(remaining);

    const ContactSpace<D> contact =
        contact_space(round.nearNet, scene.tool, rotations, epsVolume, options.contact);

    std::vector<DislocationFeature<D>> activeFeats;
    for (const auto& f : outcome.features)
      if (active[static_cast<std::size_t>(f.component)]) {
        round.activeFeatures.push_back(f.id);
        activeFeats.push_back(f);
      }
    round.fibers = fibersFromContact(contact, activeFeats);

    for (int i = 0; i < static_cast<int>(outcome.components.size()); ++i) {
      if (!active[static_cast<std::size_t>(i)]) continue;
      bool allAccessible = true;
      for (std::size_t k = 0; k < activeFeats.size(); ++k)
        if (activeFeats[k].component == i && round.fibers[k].empty()) {
          allAccessible = false;
          break;
        }
      if (!allAccessible) continue;
      round.removed.push_back(i);
      if (outcome.components[static_cast<std::size_t>(i)].featureIds.empty())
        round.noContactComponents.push_back(i);
    }

    if (round.removed.empty()) {
      outcome.status = RemovalStatus::Unreachable;
      for (int i = 0; i < static_cast<int>(outcome.components.size()); ++i)
        if (active[static_cast<std::size_t>(i)]) {
          outcome.remainingComponents.push_back(i);
          std::vector<int> blockers;
          for (std::size_t k = 0; k < activeFeats.size(); ++k)
            if (activeFeats[k].component == i && round.fibers[k].empty())
              blockers.push_back(activeFeats[k].id);
          outcome.blockingFeatures[i] = std::move(blockers);
        }
      outcome.rounds.push_back(std::move(round));
      return outcome;
    }

    for (int i : round.removed) {
      remaining = subtract(remaining, outcome.components[static_cast<std::size_t>(i)].voxels);
      active[static_cast<std::size_t>(i)] = false;
    }
    outcome.rounds.push_back(std::move(round));
  }
}

}  // namespace srp
