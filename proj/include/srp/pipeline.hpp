#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "srp/motion.hpp"
#include "srp/rotation_sampling.hpp"
#include "srp/tri_mesh.hpp"
#include "srp/voxelize.hpp"

namespace srp {

struct RotationSpec {
  int count = 8;
  RotationMethod method = RotationMethod::Grid2d;
  std::uint64_t seed = 0;
};

/// One planning job, loadable from a single JSON file.  Mesh paths are
/// resolved relative to the config file's directory (`baseDir`).
struct JobConfig {
  int dimension = 2;
  std::string part, support, tool;
  std::string base;  // optional fixture/base-plate mesh; empty = none
  double spacing = 1.0;
  double epsilonVoxels = 2.0;
  RotationSpec rotations;
  double wRot = 1.0, wTrans = 1.0;
  int queryPointsPerFeature = 1;
  std::vector<double> refTranslation;             // size = dimension; default zeros
  std::optional<double> refTheta;                 // 2D reference orientation
  std::optional<std::array<double, 4>> refQuat;   // 3D reference orientation, (w,x,y,z)
  PlannerOptions planner;
  VoxelizePolicy scenePolicy = VoxelizePolicy::Conservative;
  VoxelizePolicy toolPolicy = VoxelizePolicy::Conservative;
  std::string output = "out";
  bool exactTsp = false;
  std::string baseDir;  // directory of the loaded config; not serialized
};

JobConfig readJobConfig(const std::string& path);
nlohmann::ordered_json jobConfigJson(const JobConfig& cfg);

/// Reference configuration (home pose) described by the config.
template <int D>
RigidTransform<D> referenceConfig(const JobConfig& cfg);

struct PipelineResult {
  std::string verdict;  // "AllRemoved+Paths" | "Unreachable" | "PathFailure"
  nlohmann::ordered_json plan;          // deterministic plan document
  nlohmann::ordered_json meta;          // timings etc., intentionally separate
  std::vector<std::string> roundLines;  // one JSON object per round (rounds.jsonl)
};

/// Full pipeline on in-memory meshes: scene build, removability rounds,
/// per-round sequencing and motion planning, plan-document assembly.
/// `debugDir` non-empty dumps per-round voxel fields there.
template <int D>
PipelineResult runScene(const TriMesh<D>& part, const TriMesh<D>& support, const TriMesh<D>& tool,
                        const std::optional<TriMesh<D>>& base, const JobConfig& cfg,
                        const std::string& debugDir = {});

/// File-level entry point: reads meshes per the config and dispatches on
/// dimension.
PipelineResult runPipeline(const JobConfig& cfg, bool debugFields = false);

/// Writes plan.json, plan_meta.json, rounds.jsonl and per-round path traces
/// under cfg.output.
void writeOutputs(const JobConfig& cfg, const PipelineResult& result);

struct ValidationReport {
  int checks = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

/// Independent replay of a plan document: every waypoint re-classified by the
/// requested checker ("mesh" or "voxel"), fracture configurations re-checked
/// at doubled resolution, bookkeeping invariants re-asserted.  Failures are
/// report entries, never exceptions.
template <int D>
ValidationReport validateScene(const nlohmann::ordered_json& plan, const TriMesh<D>& part,
                               const TriMesh<D>& support, const TriMesh<D>& tool,
                               const std::optional<TriMesh<D>>& base, const JobConfig& cfg,
                               const std::string& mode = "mesh");

/// File-level validate: loads the plan document and meshes, dispatches on
/// dimension.
ValidationReport validatePlan(const std::string& planPath, const JobConfig& cfg,
                              const std::string& mode = "mesh");

}  // namespace srp
