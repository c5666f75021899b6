#include <doctest.h>

#include <algorithm>
#include <optional>
#include <string>

#include "srp/fixtures.hpp"
#include "srp/pipeline.hpp"

namespace {

using namespace srp;

JobConfig configFor(const Fixture<2>& f) {
  JobConfig cfg;
  cfg.dimension = 2;
  cfg.spacing = f.spacing;
  cfg.epsilonVoxels = f.epsVoxels;
  cfg.rotations.count = f.n1;
  cfg.rotations.method = RotationMethod::Grid2d;
  cfg.rotations.seed = 0;
  cfg.queryPointsPerFeature = 1;
  cfg.refTranslation = {f.tauRef.x(), f.tauRef.y()};
  cfg.planner.seed = 1;
  cfg.scenePolicy = VoxelizePolicy::Centroid;
  cfg.toolPolicy = VoxelizePolicy::Centroid;
  return cfg;
}

PipelineResult runFixture(const Fixture<2>& f, const JobConfig& cfg) {
  return runScene<2>(f.part, f.support, f.tool, std::nullopt, cfg);
}

bool anyFailureContains(const ValidationReport& rep, const std::string& needle) {
  return std::any_of(rep.failures.begin(), rep.failures.end(), [&](const std::string& s) {
    return s.find(needle) != std::string::npos;
  });
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("a job with no support is trivially done") {
  Fixture<2> f = fixtures::two_square();
  f.support = TriMesh<2>{};
  const JobConfig cfg = configFor(f);
  const auto res = runFixture(f, cfg);
  CHECK(res.verdict == "AllRemoved+Paths");
  CHECK(res.plan.at("rounds").empty());
  CHECK(res.roundLines.empty());
  CHECK(res.plan.at("outcome").at("status") == "AllRemoved");
  CHECK(res.plan.at("outcome").at("componentCount") == 0);
}

TEST_CASE("shadowed columns plan as two rounds with passing paths") {
  const Fixture<2> f = fixtures::lpart();
  const JobConfig cfg = configFor(f);
  const auto res = runFixture(f, cfg);

  CHECK(res.verdict == "AllRemoved+Paths");
  CHECK(res.plan.at("verdict") == "AllRemoved+Paths");
  REQUIRE(res.plan.at("rounds").size() == 2);
  CHECK(res.roundLines.size() == 2);
  for (const auto& rj : res.plan.at("rounds")) {
    CHECK(rj.at("path").at("verdict") == "Ok");
    CHECK(rj.at("removedComponents").size() == 1);
    CHECK(rj.at("sequence").at("visits").size() == 1);
  }

  // Independent replay in both checker models accepts the document.
  for (const std::string mode : {"mesh", "voxel"}) {
    const auto rep = validateScene<2>(res.plan, f.part, f.support, f.tool, std::nullopt, cfg, mode);
    CHECK(rep.checks > 0);
    CHECK(rep.ok());
    if (!rep.ok())
      for (const auto& fail : rep.failures) MESSAGE(mode, ": ", fail);
  }
}

TEST_CASE("a sealed cavity is reported unreachable with its blockers") {
  const Fixture<2> f = fixtures::internal_void();
  const JobConfig cfg = configFor(f);
  const auto res = runFixture(f, cfg);

  CHECK(res.verdict == "Unreachable");
  const auto& oj = res.plan.at("outcome");
  CHECK(oj.at("status") == "Unreachable");
  CHECK(oj.at("remainingComponents") == nlohmann::ordered_json::array({0}));
  REQUIRE(oj.at("blockingFeatures").contains("0"));
  CHECK(oj.at("blockingFeatures").at("0") == nlohmann::ordered_json::array({0}));

  // The unreachable document still validates: there is nothing to replay.
  const auto rep = validateScene<2>(res.plan, f.part, f.support, f.tool, std::nullopt, cfg);
  CHECK(rep.ok());
}

TEST_CASE("an escape-proof pocket downgrades the verdict to PathFailure") {
  const Fixture<2> f = fixtures::utrap();
  const JobConfig cfg = configFor(f);
  const auto res = runFixture(f, cfg);

  CHECK(res.verdict == "PathFailure");
  REQUIRE(res.plan.at("rounds").size() == 1);
  CHECK(res.plan.at("rounds")[0].at("path").at("verdict") == "PathNotFound");

  // The failed leg is the finding; the report stays clean.
  for (const std::string mode : {"mesh", "voxel"}) {
    const auto rep = validateScene<2>(res.plan, f.part, f.support, f.tool, std::nullopt, cfg, mode);
    CHECK(rep.ok());
  }
}

TEST_CASE("the validator catches a corrupted transit waypoint") {
  const Fixture<2> f = fixtures::lpart();
  const JobConfig cfg = configFor(f);
  const auto res = runFixture(f, cfg);
  REQUIRE(res.verdict == "AllRemoved+Paths");

  auto corrupted = res.plan;
  auto& states = corrupted.at("rounds")[0].at("path").at("states");
  bool planted = false;
  for (auto& sj : states) {
    if (sj.at("kind") != "transit") continue;
    // Teleport one transit waypoint deep into the part slab.
    sj.at("config")["translation"] = {8.5, 14.5};
    planted = true;
    break;
  }
  REQUIRE(planted);

  const auto rep = validateScene<2>(corrupted, f.part, f.support, f.tool, std::nullopt, cfg);
  CHECK(!rep.ok());
  CHECK(anyFailureContains(rep, "transit waypoint is free"));
}

TEST_CASE("the validator catches a faked fracture") {
  const Fixture<2> f = fixtures::lpart();
  const JobConfig cfg = configFor(f);
  const auto res = runFixture(f, cfg);
  REQUIRE(res.verdict == "AllRemoved+Paths");

  auto corrupted = res.plan;
  for (auto& sj : corrupted.at("rounds")[0].at("path").at("states"))
    if (sj.at("kind") == "fracture") {
      // Move the fracture into free space: no contact with anything.
      sj.at("config")["translation"] = {-8.0, -8.0};
      break;
    }
  const auto rep = validateScene<2>(corrupted, f.part, f.support, f.tool, std::nullopt, cfg);
  CHECK(!rep.ok());
  CHECK(anyFailureContains(rep, "fracture configuration is in ε-contact"));
}

TEST_CASE("the plan document is byte-identical across reruns") {
  const Fixture<2> f = fixtures::lpart();
  const JobConfig cfg = configFor(f);
  const auto a = runFixture(f, cfg);
  const auto b = runFixture(f, cfg);
  CHECK(a.verdict == b.verdict);
  CHECK(a.plan.dump(2) == b.plan.dump(2));
  CHECK(a.roundLines == b.roundLines);
}

}  // TEST_SUITE
