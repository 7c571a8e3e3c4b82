// Experiment runner CLI: seeded multi-run comparisons, loss-landscape slices,
// single-rollout dumps and geometry exports.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

#include "toolmorph/harness.hpp"
#include "toolmorph/io.hpp"
#include "toolmorph/losses.hpp"

using namespace toolmorph;

namespace {

ExperimentConfig make_config(const std::string& config_path, const std::string& scenario,
                             const std::string& out_dir, std::optional<std::uint64_t> seed,
                             int jobs) {
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    cfg = load_experiment_config(config_path);
  } else {
    Json j;
    if (!scenario.empty()) j["scenario"] = scenario;
    cfg = experiment_from_json(j);
  }
  if (!scenario.empty() && to_string(cfg.spec.id) != scenario) {
    // --scenario overrides the config file's choice with that scenario's defaults
    cfg.spec = default_spec(scenario_from_string(scenario));
    cfg.spec.N = desk_scale_n(cfg.spec.id);
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (seed) cfg.seed_base = *seed;
  cfg.optimizer.jobs = jobs;
  return cfg;
}

Eigen::VectorXd parse_theta(const std::string& csv, const ScenarioSpec& spec) {
  if (csv.empty()) return spec.theta0.values;
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
  if (static_cast<int>(vals.size()) != spec.d())
    throw ConfigError("--theta", "expected " + std::to_string(spec.d()) + " values, got " +
                                     std::to_string(vals.size()));
  Eigen::VectorXd theta(spec.d());
  for (int k = 0; k < spec.d(); ++k) theta[k] = vals[static_cast<std::size_t>(k)];
  return theta;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tool morphology optimization over task variations"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path, scenario, out_dir, theta_csv;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  app.add_option("--config", config_path, "experiment config (JSON)");
  app.add_option("--scenario", scenario, "winding | flipping | pushing | reaching");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "base training seed");
  app.add_option("--jobs", jobs, "parallel rollout workers");

  auto* cmd_run = app.add_subcommand("run", "train all algorithms over seeded runs and evaluate");

  auto* cmd_landscape = app.add_subcommand("landscape", "dense task-loss slice over two dims");
  std::vector<int> dims;
  int resolution = 0;
  cmd_landscape->add_option("--dims", dims, "two design dimension indices")->expected(2);
  cmd_landscape->add_option("--resolution", resolution, "grid resolution per axis");

  auto* cmd_rollout = app.add_subcommand("rollout", "single trajectory dump as CSV");
  int variation_index = 0;
  bool no_tangents = false, debug_channels = false;
  cmd_rollout->add_option("--index", variation_index, "task variation index");
  cmd_rollout->add_option("--theta", theta_csv, "comma-separated design values");
  cmd_rollout->add_flag("--no-tangents", no_tangents, "skip sensitivity propagation");
  cmd_rollout->add_flag("--debug-channels", debug_channels, "record per-body debug channels");

  auto* cmd_export = app.add_subcommand("export", "write deformed tool polygon (.txt + .svg)");
  cmd_export->add_option("--theta", theta_csv, "comma-separated design values");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = make_config(config_path, scenario, out_dir, seed, jobs);

    if (cmd_run->parsed()) {
      const EvaluationReport report = run_experiment(cfg);
      std::printf("scenario=%s runs=%d test_size=%d out=%s\n", to_string(cfg.spec.id).c_str(),
                  cfg.runs, cfg.test_size, cfg.out_dir.string().c_str());
      for (const auto& s : report.summaries)
        std::printf("%-18s runs=%d test_loss=%.6g +- %.6g success=%.3f +- %.3f\n",
                    s.algorithm.c_str(), s.runs_used, s.mean_test_loss, s.std_test_loss,
                    s.mean_success_rate, s.std_success_rate);
      std::fprintf(stderr, "total wall time: %.1fs, warnings: %d\n",
                   report.wall_seconds_total, report.warnings);
    } else if (cmd_landscape->parsed()) {
      if (dims.size() == 2) {
        cfg.landscape.dim_a = dims[0];
        cfg.landscape.dim_b = dims[1];
      }
      if (resolution > 0) cfg.landscape.resolution = resolution;
      const LandscapeResult grid = evaluate_landscape(cfg.spec, cfg.landscape, jobs);
      std::filesystem::create_directories(cfg.out_dir);
      const auto path = cfg.out_dir / ("landscape_" + to_string(cfg.spec.id) + ".csv");
      write_landscape_csv(path, grid);
      std::printf("landscape %s dims=(%d,%d) res=%d tv=%.4g failed_cells=%d -> %s\n",
                  to_string(cfg.spec.id).c_str(), cfg.landscape.dim_a, cfg.landscape.dim_b,
                  grid.resolution, normalized_total_variation(grid), grid.failed_cells,
                  path.string().c_str());
    } else if (cmd_rollout->parsed()) {
      cfg.spec.world.record_debug = debug_channels;
      const SimPipeline pipeline(cfg.spec);
      const TaskVariation var = sample_variation(cfg.spec, cfg.seed_base, variation_index);
      const Eigen::VectorXd theta = parse_theta(theta_csv, cfg.spec);
      const DeformedShape def = deform(pipeline.tool(), cfg.spec.theta0.with_values(theta));
      std::vector<int> all(static_cast<std::size_t>(cfg.spec.d()));
      std::iota(all.begin(), all.end(), 0);
      const std::vector<int> none;
      const Trajectory traj = rollout(var, seed_shape(def, no_tangents ? none : all),
                                      cfg.spec.policy, cfg.spec.world);
      std::filesystem::create_directories(cfg.out_dir.empty() ? "." : cfg.out_dir);
      const auto path = (cfg.out_dir.empty() ? std::filesystem::path(".") : cfg.out_dir) /
                        ("rollout_" + to_string(cfg.spec.id) + "_" +
                         std::to_string(variation_index) + ".csv");
      write_trajectory_csv(path, traj, no_tangents ? 0 : cfg.spec.d());
      std::printf("rollout %s index=%d task_loss=%.6g success=%d -> %s\n",
                  to_string(cfg.spec.id).c_str(), variation_index,
                  scenario_task_loss(cfg.spec, traj).value(),
                  success(cfg.spec, traj) ? 1 : 0, path.string().c_str());
    } else if (cmd_export->parsed()) {
      const Eigen::VectorXd theta = parse_theta(theta_csv, cfg.spec);
      std::filesystem::create_directories(cfg.out_dir.empty() ? "." : cfg.out_dir);
      const auto stem = (cfg.out_dir.empty() ? std::filesystem::path(".") : cfg.out_dir) /
                        ("geometry_" + to_string(cfg.spec.id));
      export_geometry(theta, cfg.spec, stem);
      std::printf("exported %s.txt and %s.svg\n", stem.string().c_str(), stem.string().c_str());
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: config: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
