#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srp/fixtures.hpp"
#include "srp/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"srp — support-removal planning for additive manufacturing"};
  app.require_subcommand(1);

  std::string configPath, planPath, mode = "mesh";
  bool debugFields = false, exactTsp = false;

  CLI::App* plan = app.add_subcommand("plan", "run the removal pipeline on a job config");
  plan->add_option("config", configPath, "job config JSON file")->required();
  plan->add_flag("--debug-fields", debugFields, "dump per-round voxel fields (VTK)");
  plan->add_flag("--exact-tsp", exactTsp, "exact visiting order when a round has <= 10 fibers");

  CLI::App* validate = app.add_subcommand("validate", "independently replay a plan document");
  validate->add_option("plan", planPath, "plan.json produced by `plan`")->required();
  validate->add_option("config", configPath, "the job config the plan was produced from")
      ->required();
  validate->add_option("--mode", mode, "replay checker")
      ->check(CLI::IsMember({"mesh", "voxel"}));

  std::vector<std::string> fixtureNames = srp::fixtures::names2d();
  for (const auto& n : srp::fixtures::names3d()) fixtureNames.push_back(n);
  fixtureNames.push_back("all");
  std::string fixtureName = "all", outDir = "fixtures";
  CLI::App* fixtures =
      app.add_subcommand("fixtures", "emit built-in fixture meshes and job configs");
  fixtures->add_option("name", fixtureName, "fixture name or \"all\"")
      ->check(CLI::IsMember(fixtureNames));
  fixtures->add_option("--out", outDir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed()) {
      srp::JobConfig cfg = srp::readJobConfig(configPath);
      if (exactTsp) cfg.exactTsp = true;
      const srp::PipelineResult result = srp::runPipeline(cfg, debugFields);
      srp::writeOutputs(cfg, result);
      std::cout << "verdict: " << result.verdict << "\n"
                << "plan:    " << cfg.output << "/plan.json\n";
    } else if (validate->parsed()) {
      const srp::JobConfig cfg = srp::readJobConfig(configPath);
      const srp::ValidationReport report = srp::validatePlan(planPath, cfg, mode);
      for (const auto& f : report.failures) std::cout << "FAIL " << f << "\n";
      std::cout << report.checks << " checks, " << report.failures.size() << " failures ("
                << mode << " mode)\n";
    } else if (fixtures->parsed()) {
      srp::fixtures::emit(fixtureName, outDir);
      std::cout << "fixtures written to " << outDir << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
