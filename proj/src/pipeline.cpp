#include "srp/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "srp/contact.hpp"
#include "srp/features.hpp"
#include "srp/fibration.hpp"
#include "srp/io/mesh_io.hpp"
#include "srp/io/vtk.hpp"
#include "srp/rounds.hpp"
#include "srp/scene.hpp"
#include "srp/sequencing.hpp"

namespace srp {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double elapsedSec(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string resolvePath(const JobConfig& cfg, const std::string& p) {
  if (p.empty() || cfg.baseDir.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(cfg.baseDir) / p).string();
}

const char* policyName(VoxelizePolicy p) {
  return p == VoxelizePolicy::Centroid ? "centroid" : "conservative";
}

VoxelizePolicy policyFromString(const std::string& s) {
  if (s == "centroid") return VoxelizePolicy::Centroid;
  if (s == "conservative") return VoxelizePolicy::Conservative;
  raise(Errc::ConfigError, "unknown voxelize policy: " + s);
}

template <int D>
ordered_json vecJson(const Vec<D>& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < D; ++i) a.push_back(v[i]);
  return a;
}

template <int D>
Vec<D> vecFromJson(const ordered_json& j) {
  if (!j.is_array() || j.size() != D) raise(Errc::ConfigError, "expected a vector of size " + std::to_string(D));
  Vec<D> v;
  for (int i = 0; i < D; ++i) v[i] = j.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

ordered_json transformJson(const RigidTransform<2>& tau) {
  ordered_json j;
  j["theta"] = tau.r.theta;
  j["translation"] = vecJson<2>(tau.t);
  return j;
}

ordered_json transformJson(const RigidTransform<3>& tau) {
  ordered_json j;
  j["quaternion"] = {tau.r.q.w(), tau.r.q.x(), tau.r.q.y(), tau.r.q.z()};
  j["translation"] = vecJson<3>(tau.t);
  return j;
}

template <int D>
RigidTransform<D> transformFromJson(const ordered_json& j) {
  RigidTransform<D> tau = RigidTransform<D>::identity();
  tau.t = vecFromJson<D>(j.at("translation"));
  if constexpr (D == 2) {
    if (j.contains("theta")) tau.r = Rotation<2>::fromAngle(j.at("theta").get<double>());
  } else {
    if (j.contains("quaternion")) {
      const auto& q = j.at("quaternion");
      if (!q.is_array() || q.size() != 4) raise(Errc::ConfigError, "quaternion must be [w,x,y,z]");
      tau.r = Rotation<3>::fromQuaternion(Eigen::Quaterniond(
          q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>(), q.at(3).get<double>()));
    }
  }
  return tau;
}

template <int D>
ordered_json sequenceJson(const VisitSequence<D>& s) {
  ordered_json j;
  j["cost"] = s.cost;
  j["edgeCost"] = s.edgeCost;
  j["mstWeight"] = s.mstWeight;
  j["triangleHolds"] = s.triangleHolds;
  j["withinTwoMst"] = s.withinTwoMst;
  ordered_json visits = ordered_json::array();
  for (const auto& v : s.visits) {
    ordered_json vj;
    vj["feature"] = v.featureId;
    vj["vertex"] = v.vertex;
    vj["member"] = v.member;
    vj["config"] = transformJson(v.config);
    visits.push_back(vj);
  }
  j["visits"] = visits;
  return j;
}

template <int D>
ordered_json pathJson(const ToolPath<D>& p, const RotationSample<D>& rots) {
  ordered_json j;
  j["verdict"] = to_string(p.verdict);
  j["resolution"] = p.resolution;
  if (p.verdict != LegVerdict::Ok) {
    j["failedLeg"] = p.failedLeg;
    j["failedFeature"] = p.failedFeature;
  }
  ordered_json states = ordered_json::array();
  for (const auto& s : p.states) {
    ordered_json sj;
    sj["leg"] = s.leg;
    sj["kind"] = to_string(s.kind);
    sj["rotation"] = s.rotation;
    sj["config"] = transformJson(
        RigidTransform<D>{rots.rotations[static_cast<std::size_t>(s.rotation)], s.translation});
    states.push_back(sj);
  }
  j["states"] = states;
  return j;
}

/// Vertex-connected shells of a boundary mesh (merged meshes never share
/// vertex indices, so touching solids stay separate).
template <int D>
std::vector<TriMesh<D>> splitShells(const TriMesh<D>& m) {
  const int nv = static_cast<int>(m.vertices.size());
  std::vector<int> parent(static_cast<std::size_t>(nv));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  auto unite = [&](int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); };
  for (const auto& f : m.faces)
    for (int k = 1; k < TriMesh<D>::kFaceSize; ++k) unite(f[0], f[k]);

  std::map<int, int> shellOf;  // root → shell index, in first-seen face order
  std::vector<TriMesh<D>> shells;
  std::vector<std::map<int, int>> remap;  // per shell: old vertex id → new id
  for (const auto& f : m.faces) {
    const int root = find(f[0]);
    auto [it, fresh] = shellOf.try_emplace(root, static_cast<int>(shells.size()));
    if (fresh) {
      shells.emplace_back();
      remap.emplace_back();
    }
    TriMesh<D>& shell = shells[static_cast<std::size_t>(it->second)];
    auto& mp = remap[static_cast<std::size_t>(it->second)];
    std::array<int, static_cast<std::size_t>(TriMesh<D>::kFaceSize)> nf{};
    for (int k = 0; k < TriMesh<D>::kFaceSize; ++k) {
      auto [vit, vfresh] = mp.try_emplace(f[k], static_cast<int>(shell.vertices.size()));
      if (vfresh) shell.vertices.push_back(m.vertices[static_cast<std::size_t>(f[k])]);
      nf[static_cast<std::size_t>(k)] = vit->second;
    }
    shell.faces.push_back(nf);
  }
  return shells;
}

/// Maps each support shell to the voxel component it overlaps the most.
template <int D>
std::vector<int> mapShellsToComponents(const std::vector<TriMesh<D>>& shells,
                                       const std::vector<SupportComponent<D>>& comps,
                                       const GridFrame<D>& frame, VoxelizePolicy policy) {
  std::vector<int> out(shells.size(), -1);
  for (std::size_t i = 0; i < shells.size(); ++i) {
    const VoxelGrid<D> g = voxelizeInto(shells[i], frame, policy);
    Eigen::Index best = 0;
    for (const auto& c : comps) {
      const Eigen::Index overlap = ((g.values != 0.0) && (c.voxels.values != 0.0)).count();
      if (overlap > best) {
        best = overlap;
        out[i] = c.id;
      }
    }
  }
  return out;
}

template <int D>
TriMesh<D> readMeshFile(const JobConfig& cfg, const std::string& path) {
  return io::readMesh<D>(resolvePath(cfg, path));
}

std::uint64_t asU64(const ordered_json& j) {
  return j.is_number_unsigned() ? j.get<std::uint64_t>()
                                : static_cast<std::uint64_t>(j.get<std::int64_t>());
}

void requirePositive(double v, const char* what) {
  if (!(v > 0.0)) raise(Errc::ConfigError, std::string(what) + " must be positive");
}

}  // namespace

JobConfig readJobConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot open config: " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    raise(Errc::ConfigError, "config parse failure: " + std::string(e.what()));
  }

  JobConfig cfg;
  cfg.baseDir = fs::path(path).parent_path().string();
  cfg.dimension = j.value("dimension", 2);
  if (cfg.dimension != 2 && cfg.dimension != 3)
    raise(Errc::ConfigError, "dimension must be 2 or 3");
  for (const char* key : {"part", "support", "tool"})
    if (!j.contains(key)) raise(Errc::ConfigError, std::string("config missing \"") + key + "\"");
  cfg.part = j.at("part").get<std::string>();
  cfg.support = j.at("support").get<std::string>();
  cfg.tool = j.at("tool").get<std::string>();
  cfg.base = j.value("base", std::string{});
  cfg.spacing = j.value("spacing", 1.0);
  requirePositive(cfg.spacing, "spacing");
  cfg.epsilonVoxels = j.value("epsilonVoxels", 2.0);
  requirePositive(cfg.epsilonVoxels, "epsilonVoxels");
  if (j.contains("rotations")) {
    const auto& r = j.at("rotations");
    cfg.rotations.count = r.value("count", 8);
    cfg.rotations.method = rotationMethodFromString(
        r.value("method", cfg.dimension == 2 ? std::string("grid2d") : std::string("fibonacci")));
    if (r.contains("seed")) cfg.rotations.seed = asU64(r.at("seed"));
  } else if (cfg.dimension == 3) {
    cfg.rotations.method = RotationMethod::Fibonacci;
  }
  if (cfg.rotations.count < 1) raise(Errc::ConfigError, "rotations.count must be >= 1");
  if (j.contains("weights")) {
    cfg.wRot = j.at("weights").value("rotation", 1.0);
    cfg.wTrans = j.at("weights").value("translation", 1.0);
  }
  requirePositive(cfg.wRot, "weights.rotation");
  requirePositive(cfg.wTrans, "weights.translation");
  cfg.queryPointsPerFeature = j.value("queryPointsPerFeature", 1);
  if (cfg.queryPointsPerFeature < 1)
    raise(Errc::ConfigError, "queryPointsPerFeature must be >= 1");
  if (j.contains("referenceConfig")) {
    const auto& r = j.at("referenceConfig");
    if (r.contains("translation")) {
      const auto& t = r.at("translation");
      if (!t.is_array() || static_cast<int>(t.size()) != cfg.dimension)
        raise(Errc::ConfigError, "referenceConfig.translation size must match dimension");
      for (const auto& x : t) cfg.refTranslation.push_back(x.get<double>());
    }
    if (r.contains("theta")) cfg.refTheta = r.at("theta").get<double>();
    if (r.contains("quaternion")) {
      const auto& q = r.at("quaternion");
      if (!q.is_array() || q.size() != 4)
        raise(Errc::ConfigError, "referenceConfig.quaternion must be [w,x,y,z]");
      cfg.refQuat = {{q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>(),
                      q.at(3).get<double>()}};
    }
  }
  if (j.contains("planner")) {
    const auto& p = j.at("planner");
    cfg.planner.stepSize = p.value("stepSize", 0.0);
    cfg.planner.maxNodes = p.value("maxNodes", 4000);
    cfg.planner.timeBudgetSec = p.value("timeBudgetSec", 10.0);
    cfg.planner.goalBias = p.value("goalBias", 0.1);
    cfg.planner.memberRetries = p.value("memberRetries", 3);
    cfg.planner.retractRadius = p.value("retractRadius", 4);
    cfg.planner.shortcutRounds = p.value("shortcutRounds", 2);
    if (p.contains("seed")) cfg.planner.seed = asU64(p.at("seed"));
  }
  if (j.contains("policy")) {
    const auto& p = j.at("policy");
    cfg.scenePolicy = policyFromString(p.value("scene", std::string("conservative")));
    cfg.toolPolicy = policyFromString(p.value("tool", std::string("conservative")));
  }
  cfg.output = j.value("output", std::string("out"));
  cfg.exactTsp = j.value("exactTsp", false);
  return cfg;
}

nlohmann::ordered_json jobConfigJson(const JobConfig& cfg) {
  ordered_json j;
  j["dimension"] = cfg.dimension;
  j["part"] = cfg.part;
  j["support"] = cfg.support;
  j["tool"] = cfg.tool;
  if (!cfg.base.empty()) j["base"] = cfg.base;
  j["spacing"] = cfg.spacing;
  j["epsilonVoxels"] = cfg.epsilonVoxels;
  j["rotations"] = {{"count", cfg.rotations.count},
                    {"method", to_string(cfg.rotations.method)},
                    {"seed", cfg.rotations.seed}};
  j["weights"] = {{"rotation", cfg.wRot}, {"translation", cfg.wTrans}};
  j["queryPointsPerFeature"] = cfg.queryPointsPerFeature;
  j["policy"] = {{"scene", policyName(cfg.scenePolicy)}, {"tool", policyName(cfg.toolPolicy)}};
  ordered_json ref;
  ordered_json t = ordered_json::array();
  for (int a = 0; a < cfg.dimension; ++a)
    t.push_back(a < static_cast<int>(cfg.refTranslation.size()) ? cfg.refTranslation[static_cast<std::size_t>(a)]
                                                                : 0.0);
  ref["translation"] = t;
  if (cfg.refTheta) ref["theta"] = *cfg.refTheta;
  if (cfg.refQuat)
    ref["quaternion"] = {(*cfg.refQuat)[0], (*cfg.refQuat)[1], (*cfg.refQuat)[2], (*cfg.refQuat)[3]};
  j["referenceConfig"] = ref;
  j["planner"] = {{"stepSize", cfg.planner.stepSize},
                  {"maxNodes", cfg.planner.maxNodes},
                  {"timeBudgetSec", cfg.planner.timeBudgetSec},
                  {"goalBias", cfg.planner.goalBias},
                  {"memberRetries", cfg.planner.memberRetries},
                  {"retractRadius", cfg.planner.retractRadius},
                  {"shortcutRounds", cfg.planner.shortcutRounds},
                  {"seed", cfg.planner.seed}};
  j["output"] = cfg.output;
  j["exactTsp"] = cfg.exactTsp;
  return j;
}

template <int D>
RigidTransform<D> referenceConfig(const JobConfig& cfg) {
  RigidTransform<D> tau = RigidTransform<D>::identity();
  if (!cfg.refTranslation.empty()) {
    if (static_cast<int>(cfg.refTranslation.size()) != D)
      raise(Errc::ConfigError, "referenceConfig.translation size must match dimension");
    for (int a = 0; a < D; ++a) tau.t[a] = cfg.refTranslation[static_cast<std::size_t>(a)];
  }
  if constexpr (D == 2) {
    if (cfg.refTheta) tau.r = Rotation<2>::fromAngle(*cfg.refTheta);
  } else {
    if (cfg.refQuat)
      tau.r = Rotation<3>::fromQuaternion(Eigen::Quaterniond(
          (*cfg.refQuat)[0], (*cfg.refQuat)[1], (*cfg.refQuat)[2], (*cfg.refQuat)[3]));
  }
  return tau;
}

template RigidTransform<2> referenceConfig<2>(const JobConfig&);
template RigidTransform<3> referenceConfig<3>(const JobConfig&);

template <int D>
PipelineResult runScene(const TriMesh<D>& part, const TriMesh<D>& support, const TriMesh<D>& tool,
                        const std::optional<TriMesh<D>>& base, const JobConfig& cfg,
                        const std::string& debugDir) {
  const auto t0 = Clock::now();
  SceneBuildParams<D> params;
  params.spacing = cfg.spacing;
  params.scenePolicy = cfg.scenePolicy;
  params.toolPolicy = cfg.toolPolicy;
  const Scene<D> scene = buildScene(part, support, tool, params, base);

  const RotationSample<D> rotations =
      sample_rotations<D>(cfg.rotations.count, cfg.rotations.method, cfg.rotations.seed);
  const double epsVolume = cfg.epsilonVoxels * std::pow(cfg.spacing, D);
  const RigidTransform<D> tauRef = referenceConfig<D>(cfg);

  RoundsOptions<D> ropt;
  ropt.queryPointsPerFeature = cfg.queryPointsPerFeature;
  const auto tRounds = Clock::now();
  const PlanOutcome<D> outcome = removable_rounds(scene, rotations, epsVolume, ropt);
  const double roundsSec = elapsedSec(tRounds);

  if (!debugDir.empty()) fs::create_directories(debugDir);

  PipelineResult res;
  ordered_json planRounds = ordered_json::array();
  bool pathFailure = false;
  double planSec = 0.0;
  double contactSec = 0.0;

  for (const auto& round : outcome.rounds) {
    ordered_json rj;
    rj["round"] = round.round;
    rj["removedComponents"] = round.removed;
    rj["noContactComponents"] = round.noContactComponents;

    ordered_json line;
    line["round"] = round.round;
    line["removed"] = round.removed;
    line["noContactComponents"] = round.noContactComponents;
    line["activeFeatures"] = round.activeFeatures;
    ordered_json fiberSizes = ordered_json::array();
    for (const auto& f : round.fibers) fiberSizes.push_back(static_cast<int>(f.anchors.size()));
    line["fiberAnchors"] = fiberSizes;

    if (!debugDir.empty()) {
      io::writeVtk(debugDir + "/round_" + std::to_string(round.round) + "_nearnet.vtk", round.nearNet,
               "nearnet");
      io::writeVtk(debugDir + "/round_" + std::to_string(round.round) + "_support.vtk", round.support,
               "support");
    }

    // Features scheduled this round: those of removed components (vacuously
    // removed ones have no features, hence no visits).
    const std::set<int> removedSet(round.removed.begin(), round.removed.end());
    std::vector<Fiber<D>> roundFibers;
    std::vector<FiberConfigs<D>> fiberCfgs;
    for (std::size_t k = 0; k < round.activeFeatures.size(); ++k) {
      const Fiber<D>& fib = round.fibers[k];
      const int fid = round.activeFeatures[k];
      int comp = -1;
      for (const auto& f : outcome.features)
        if (f.id == fid) {
          comp = f.component;
          break;
        }
      if (comp < 0 || removedSet.count(comp) == 0 || fib.empty()) continue;
      roundFibers.push_back(fib);
      fiberCfgs.push_back(FiberConfigs<D>{fid, fib.configurations(rotations)});
    }

    if (!fiberCfgs.empty()) {
      const auto tContact = Clock::now();
      ContactBuildOptions copt;
      copt.keepObstacleMasks = true;
      const ContactSpace<D> cspace =
          contact_space(round.nearNet, scene.tool, rotations, epsVolume, copt);
      contactSec += elapsedSec(tContact);

      if (!debugDir.empty())
        io::writeVtk(debugDir + "/round_" + std::to_string(round.round) + "_contacts.vtk",
                 projected_contact_field(cspace), "contacts");

      const VoxelChecker<D> checker(&cspace);
      const FiberGraph<D> g = build_graph(fiberCfgs, tauRef, cfg.wRot, cfg.wTrans);
      VisitSequence<D> seq =
          (cfg.exactTsp && static_cast<int>(fiberCfgs.size()) <= 10) ? exact_tsp(g) : tsp_tour(g);
      seq = greedy_configs(seq, g);

      PlannerOptions popt = cfg.planner;
      popt.wRot = cfg.wRot;
      popt.wTrans = cfg.wTrans;
      popt.seed = subSeed(cfg.planner.seed, static_cast<std::uint64_t>(round.round));

      const auto tPlan = Clock::now();
      const RoundPlan<D> rp = plan_round(checker, seq, roundFibers, rotations, tauRef, popt);
      planSec += elapsedSec(tPlan);
      if (!rp.success) pathFailure = true;

      rj["sequence"] = sequenceJson(rp.sequence);
      rj["path"] = pathJson(rp.path, rotations);
      line["pathVerdict"] = to_string(rp.path.verdict);
    }

    res.roundLines.push_back(line.dump());
    planRounds.push_back(rj);
  }

  res.verdict = outcome.status == RemovalStatus::Unreachable
                    ? "Unreachable"
                    : (pathFailure ? "PathFailure" : "AllRemoved+Paths");

  res.plan["schema"] = "srp-plan/1";
  res.plan["config"] = jobConfigJson(cfg);
  res.plan["verdict"] = res.verdict;
  ordered_json oj;
  oj["status"] = to_string(outcome.status);
  oj["componentCount"] = static_cast<int>(outcome.components.size());
  oj["featureCount"] = static_cast<int>(outcome.features.size());
  oj["remainingComponents"] = outcome.remainingComponents;
  ordered_json blockers = ordered_json::object();
  for (const auto& [comp, feats] : outcome.blockingFeatures) blockers[std::to_string(comp)] = feats;
  oj["blockingFeatures"] = blockers;
  res.plan["outcome"] = oj;
  res.plan["rounds"] = planRounds;

  res.meta["schema"] = "srp-plan-meta/1";
  res.meta["library"] = "srp 0.1.0";
  res.meta["rotationTag"] = rotations.tag();
  res.meta["sceneCells"] = static_cast<long long>(scene.part.frame.cellCount());
  res.meta["timings"] = {{"totalSec", elapsedSec(t0)},
                         {"roundsSec", roundsSec},
                         {"contactSec", contactSec},
                         {"planSec", planSec}};
  return res;
}

template PipelineResult runScene<2>(const TriMesh<2>&, const TriMesh<2>&, const TriMesh<2>&,
                                    const std::optional<TriMesh<2>>&, const JobConfig&,
                                    const std::string&);
template PipelineResult runScene<3>(const TriMesh<3>&, const TriMesh<3>&, const TriMesh<3>&,
                                    const std::optional<TriMesh<3>>&, const JobConfig&,
                                    const std::string&);

namespace {

template <int D>
PipelineResult runFiles(const JobConfig& cfg, bool debugFields) {
  const TriMesh<D> part = readMeshFile<D>(cfg, cfg.part);
  const TriMesh<D> support = readMeshFile<D>(cfg, cfg.support);
  const TriMesh<D> tool = readMeshFile<D>(cfg, cfg.tool);
  std::optional<TriMesh<D>> base;
  if (!cfg.base.empty()) base = readMeshFile<D>(cfg, cfg.base);
  const std::string debugDir = debugFields ? cfg.output + "/debug" : std::string{};
  return runScene<D>(part, support, tool, base, cfg, debugDir);
}

}  // namespace

PipelineResult runPipeline(const JobConfig& cfg, bool debugFields) {
  return cfg.dimension == 2 ? runFiles<2>(cfg, debugFields) : runFiles<3>(cfg, debugFields);
}

void writeOutputs(const JobConfig& cfg, const PipelineResult& result) {
  fs::create_directories(cfg.output);
  const auto writeText = [](const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::IoError, "cannot write " + path);
    out << text;
  };
  writeText(cfg.output + "/plan.json", result.plan.dump(2) + "\n");
  writeText(cfg.output + "/plan_meta.json", result.meta.dump(2) + "\n");
  std::string lines;
  for (const auto& l : result.roundLines) lines += l + "\n";
  writeText(cfg.output + "/rounds.jsonl", lines);

  std::string summary = "verdict: " + result.verdict + "\nrounds: " +
                        std::to_string(result.plan.at("rounds").size()) + "\n";
  writeText(cfg.output + "/summary.txt", summary);

  for (const auto& rj : result.plan.at("rounds")) {
    if (!rj.contains("path")) continue;
    const std::string obj =
        cfg.output + "/round_" + std::to_string(rj.at("round").get<int>()) + "_path.obj";
    if (cfg.dimension == 2) {
      std::vector<Vec<2>> pts;
      for (const auto& sj : rj.at("path").at("states"))
        pts.push_back(vecFromJson<2>(sj.at("config").at("translation")));
      io::writePathObj(obj, pts);
    } else {
      std::vector<Vec<3>> pts;
      for (const auto& sj : rj.at("path").at("states"))
        pts.push_back(vecFromJson<3>(sj.at("config").at("translation")));
      io::writePathObj(obj, pts);
    }
  }
}

template <int D>
ValidationReport validateScene(const nlohmann::ordered_json& plan, const TriMesh<D>& part,
                               const TriMesh<D>& support, const TriMesh<D>& tool,
                               const std::optional<TriMesh<D>>& base, const JobConfig& cfg,
                               const std::string& mode) {
  if (mode != "mesh" && mode != "voxel")
    raise(Errc::ConfigError, "validate mode must be \"mesh\" or \"voxel\"");

  ValidationReport rep;
  const auto check = [&rep](bool ok, const std::string& msg) {
    ++rep.checks;
    if (!ok) rep.failures.push_back(msg);
  };

  check(plan.contains("schema") && plan.at("schema") == "srp-plan/1", "plan schema tag");
  if (!plan.contains("rounds") || !plan.at("rounds").is_array()) {
    ++rep.checks;
    rep.failures.push_back("plan has no rounds array");
    return rep;
  }

  SceneBuildParams<D> params;
  params.spacing = cfg.spacing;
  params.scenePolicy = cfg.scenePolicy;
  params.toolPolicy = cfg.toolPolicy;
  const Scene<D> scene = buildScene(part, support, tool, params, base);
  const RotationSample<D> rotations =
      sample_rotations<D>(cfg.rotations.count, cfg.rotations.method, cfg.rotations.seed);
  const double epsVolume = cfg.epsilonVoxels * std::pow(cfg.spacing, D);
  const double h = cfg.spacing;
  const RigidTransform<D> tauRef = referenceConfig<D>(cfg);

  const auto feats = dislocation_features(scene.part, scene.support, cfg.queryPointsPerFeature);
  const auto comps = supportComponents(scene.support, feats);
  const auto shells = splitShells(support);
  const auto shellComp =
      mapShellsToComponents(shells, comps, scene.support.frame, cfg.scenePolicy);
  for (std::size_t i = 0; i < shells.size(); ++i)
    check(shellComp[i] >= 0, "support shell " + std::to_string(i) + " maps to a component");

  const std::string planVerdict = plan.value("verdict", std::string{});
  check(planVerdict == "AllRemoved+Paths" || planVerdict == "Unreachable" ||
            planVerdict == "PathFailure",
        "verdict is one of the three pipeline verdicts");

  std::set<int> removedBefore;
  bool allPathsOk = true;

  for (const auto& rj : plan.at("rounds")) {
    const int roundId = rj.value("round", -1);
    const std::string tag = "round " + std::to_string(roundId) + ": ";

    std::vector<int> removedNow;
    if (rj.contains("removedComponents"))
      for (const auto& c : rj.at("removedComponents")) {
        const int cid = c.get<int>();
        check(cid >= 0 && cid < static_cast<int>(comps.size()),
              tag + "removed component id " + std::to_string(cid) + " exists");
        if (cid >= 0 && cid < static_cast<int>(comps.size())) removedNow.push_back(cid);
      }

    if (!rj.contains("path")) {
      for (int c : removedNow) removedBefore.insert(c);
      continue;
    }
    const auto& pj = rj.at("path");
    const std::string pathVerdict = pj.value("verdict", std::string{});
    if (pathVerdict != "Ok") allPathsOk = false;
    if (pathVerdict != "Ok") {
      // A failed leg is itself the finding; the truncated path carries no
      // per-waypoint guarantees (a blocked start is recorded as a state).
      for (int c : removedNow) removedBefore.insert(c);
      continue;
    }

    // Round-start near-net: part plus every support shell not yet removed.
    TriMesh<D> nearMesh = part;
    VoxelGrid<D> remaining = scene.support;
    for (std::size_t i = 0; i < shells.size(); ++i)
      if (removedBefore.count(shellComp[i]) == 0) nearMesh = mergeMeshes(nearMesh, shells[i]);
    for (int c : removedBefore)
      remaining = subtract(remaining, comps[static_cast<std::size_t>(c)].voxels);
    if (base) nearMesh = mergeMeshes(nearMesh, *base);

    std::optional<MeshChecker<D>> meshChecker;
    std::optional<ContactSpace<D>> voxelSpace;
    std::optional<VoxelChecker<D>> voxelChecker;
    if (mode == "mesh") {
      meshChecker.emplace(nearMesh, scene.tool.mesh, epsVolume, h / 8.0);
    } else {
      ContactBuildOptions copt;
      copt.keepObstacleMasks = true;
      voxelSpace = contact_space(scene.nearNet(remaining), scene.tool, rotations, epsVolume, copt);
      voxelChecker.emplace(&*voxelSpace);
    }

    std::vector<std::pair<int, Vec<D>>> fractures;
    RigidTransform<D> prev;
    bool first = true;
    double maxStep = 0.0;
    const auto& states = pj.at("states");
    for (std::size_t si = 0; si < states.size(); ++si) {
      const auto& sj = states[si];
      const std::string where = tag + "state " + std::to_string(si);
      const RigidTransform<D> tau = transformFromJson<D>(sj.at("config"));
      const int rot = sj.value("rotation", -1);
      check(rot >= 0 && rot < rotations.size(), where + ": rotation index in range");
      if (rot >= 0 && rot < rotations.size())
        check(rotationAngle(rotations.rotations[static_cast<std::size_t>(rot)], tau.r) <= 1e-9,
              where + ": state orientation matches the sampled set");

      const Classification c = mode == "mesh" ? meshChecker->classify(tau)
                                              : voxelChecker->classify(rot, tau.t);
      const std::string kind = sj.value("kind", std::string{});
      if (kind == "transit") {
        check(c == Classification::Free, where + ": transit waypoint is free (got " +
                                             std::string(to_string(c)) + ")");
      } else if (kind == "approach") {
        check(c != Classification::Collide, where + ": approach waypoint is free-or-contact");
      } else if (kind == "fracture") {
        fractures.emplace_back(rot, tau.t);
        check(c == Classification::Contact, where + ": fracture configuration is in ε-contact (got " +
                                                std::string(to_string(c)) + ")");
      } else {
        check(false, where + ": known waypoint kind");
      }
      if (!first)
        maxStep = std::max(maxStep, riemannian_distance(prev, tau, cfg.wRot, cfg.wTrans));
      prev = tau;
      first = false;
    }

    if (pathVerdict == "Ok" && !states.empty()) {
      const RigidTransform<D> head = transformFromJson<D>(states.front().at("config"));
      const RigidTransform<D> tail = transformFromJson<D>(states.back().at("config"));
      check((head.t - tauRef.t).norm() <= 1e-9, tag + "path starts at the reference translation");
      check((tail.t - tauRef.t).norm() <= 1e-9, tag + "path returns to the reference translation");
      const std::size_t visitCount =
          rj.contains("sequence") ? rj.at("sequence").at("visits").size() : 0;
      check(fractures.size() == visitCount, tag + "one fracture per scheduled visit");
      const double reported = pj.value("resolution", 0.0);
      check(maxStep <= reported + 1e-9, tag + "reported resolution bounds the replayed steps");
    }

    // Fracture contacts must survive a doubling of the grid resolution (the
    // ε-threshold is a volume, so it rescales automatically). Each pose is
    // replayed exactly — rasterized at the fine lattice, never re-snapped.
    if (pathVerdict == "Ok" && !fractures.empty()) {
      TriMesh<D> remMesh;
      for (std::size_t i = 0; i < shells.size(); ++i)
        if (removedBefore.count(shellComp[i]) == 0) remMesh = mergeMeshes(remMesh, shells[i]);
      SceneBuildParams<D> halfParams = params;
      halfParams.spacing = h / 2.0;
      const Scene<D> half = buildScene(part, remMesh, tool, halfParams, base);
      const VoxelGrid<D> halfN = half.nearNet(half.support);
      const long long epsCnt = epsilonCount(epsVolume, halfN.frame.spacing, D);
      for (std::size_t fi = 0; fi < fractures.size(); ++fi) {
        const RigidTransform<D> tau{rotations.rotations[static_cast<std::size_t>(
                                        fractures[fi].first)],
                                    fractures[fi].second};
        const long long cnt = overlap_count(halfN, half.tool, tau);
        check(classifyCount<D>(cnt, epsCnt) == Classification::Contact,
              tag + "fracture " + std::to_string(fi) + " stays in contact at doubled resolution");
      }
    }

    for (int c : removedNow) removedBefore.insert(c);
  }

  if (planVerdict == "AllRemoved+Paths")
    check(allPathsOk, "AllRemoved+Paths implies every round path verdict is Ok");

  return rep;
}

template ValidationReport validateScene<2>(const nlohmann::ordered_json&, const TriMesh<2>&,
                                           const TriMesh<2>&, const TriMesh<2>&,
                                           const std::optional<TriMesh<2>>&, const JobConfig&,
                                           const std::string&);
template ValidationReport validateScene<3>(const nlohmann::ordered_json&, const TriMesh<3>&,
                                           const TriMesh<3>&, const TriMesh<3>&,
                                           const std::optional<TriMesh<3>>&, const JobConfig&,
                                           const std::string&);

namespace {

template <int D>
ValidationReport validateFiles(const ordered_json& plan, const JobConfig& cfg,
                               const std::string& mode) {
  const TriMesh<D> part = readMeshFile<D>(cfg, cfg.part);
  const TriMesh<D> support = readMeshFile<D>(cfg, cfg.support);
  const TriMesh<D> tool = readMeshFile<D>(cfg, cfg.tool);
  std::optional<TriMesh<D>> base;
  if (!cfg.base.empty()) base = readMeshFile<D>(cfg, cfg.base);
  return validateScene<D>(plan, part, support, tool, base, cfg, mode);
}

}  // namespace

ValidationReport validatePlan(const std::string& planPath, const JobConfig& cfg,
                              const std::string& mode) {
  std::ifstream in(planPath);
  if (!in) raise(Errc::IoError, "cannot open plan: " + planPath);
  ordered_json plan;
  try {
    in >> plan;
  } catch (const std::exception& e) {
    raise(Errc::ConfigError, "plan parse failure: " + std::string(e.what()));
  }
  return cfg.dimension == 2 ? validateFiles<2>(plan, cfg, mode) : validateFiles<3>(plan, cfg, mode);
}

}  // namespace srp
