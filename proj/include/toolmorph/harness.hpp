#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "toolmorph/config.hpp"
#include "toolmorph/continual.hpp"
#include "toolmorph/io.hpp"
#include "toolmorph/pipeline.hpp"

namespace toolmorph {

struct RunRecord {
  int run = 0;
  std::string algorithm;
  std::uint64_t seed = 0;
  Eigen::VectorXd theta;
  double train_loss = 0.0;
  double test_mean_loss = 0.0;
  double test_success_rate = 0.0;
  bool excluded = false;        // failed run, not part of the aggregates
  double wall_seconds = 0.0;    // in-memory only; CSV carries a placeholder
};

struct AlgorithmSummary {
  std::string algorithm;
  int runs_used = 0;
  double mean_test_loss = 0.0;
  double std_test_loss = 0.0;
  double mean_success_rate = 0.0;
  double std_success_rate = 0.0;
  int warnings = 0;
};

struct EvaluationReport {
  std::vector<RunRecord> runs;
  std::vector<AlgorithmSummary> summaries;
  double wall_seconds_total = 0.0;
  int warnings = 0;

  const AlgorithmSummary& summary(const std::string& algorithm) const {
    for (const auto& s : summaries)
      if (s.algorithm == algorithm) return s;
    throw Error("no summary for algorithm '" + algorithm + "'");
  }
};

namespace detail {

// Sample standard deviation (n-1), the convention used for the
// mean-and-std-over-runs reporting.
inline std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size() - 1);
  return {mean, std::sqrt(var)};
}

struct TestScore {
  double mean_loss = 0.0;
  double success_rate = 0.0;
};

inline TestScore evaluate_on_test(const SimPipeline& pipeline, const Eigen::VectorXd& theta,
                                  const std::vector<TaskVariation>& test_set, int jobs) {
  std::vector<double> losses(test_set.size());
  std::vector<int> successes(test_set.size());
  const DeformedShape def = deform(pipeline.tool(), pipeline.bounds().with_values(theta));
  parallel_for(static_cast<int>(test_set.size()), jobs, [&](int i) {
    const auto& var = test_set[static_cast<std::size_t>(i)];
    const Trajectory traj =
        rollout(var, seed_shape(def, {}), pipeline.spec().policy, pipeline.spec().world);
    losses[static_cast<std::size_t>(i)] = scenario_task_loss(pipeline.spec(), traj).value();
    successes[static_cast<std::size_t>(i)] = success(pipeline.spec(), traj) ? 1 : 0;
  });
  TestScore score;
  for (double l : losses) score.mean_loss += l;
  score.mean_loss /= static_cast<double>(losses.size());
  for (int s : successes) score.success_rate += s;
  score.success_rate /= static_cast<double>(successes.size());
  return score;
}

inline OptimizerRun dispatch_algorithm(const std::string& name, const SimPipeline& pipeline,
                                       const BatchSchedule& schedule,
                                       const OptimizerConfig& cfg, std::uint64_t seed) {
  if (name == "ours") return run_ours(pipeline, schedule, cfg, seed);
  if (name == "simple_continual") return run_simple_continual(pipeline, schedule, cfg);
  if (name == "baseline_diffhand") return run_baseline_diffhand(pipeline, schedule, cfg);
  throw ConfigError("algorithms", "unknown algorithm '" + name + "'");
}

inline void write_history_csv(const std::filesystem::path& path, const std::string& algorithm,
                              const OptimizerRun& run, int d) {
  std::vector<std::string> header = {"batch", "algorithm"};
  for (int k = 0; k < d; ++k) header.push_back("theta_" + std::to_string(k));
  header.insert(header.end(), {"train_loss", "grad_norm", "step_scale", "active_dims",
                               "skipped", "wall_ms"});
  CsvWriter csv(path, header);
  for (const auto& rec : run.history) {
    std::vector<std::string> cells = {std::to_string(rec.batch), algorithm};
    for (int k = 0; k < d; ++k) cells.push_back(fmt_double(rec.theta[k]));
    std::string dims;
    for (std::size_t i = 0; i < rec.active_dims.size(); ++i)
      dims += (i ? ";" : "") + std::to_string(rec.active_dims[i]);
    cells.insert(cells.end(),
                 {fmt_double(rec.train_loss), fmt_double(rec.grad_norm),
                  fmt_double(rec.step_scale), dims, rec.skipped ? "1" : "0", "0"});
    csv.row(cells);
  }
}

}  // namespace detail

// Deformed geometry export: plain-text polygon plus an SVG rendering.
// Idempotent: same theta, same bytes.
inline void export_geometry(const Eigen::VectorXd& theta, const ScenarioSpec& spec,
                            const std::filesystem::path& stem) {
  const ToolShape tool = spec.make_tool_shape();
  const DeformedShape def = deform(tool, spec.theta0.with_values(theta));
  write_polygon_text(stem.string() + ".txt", def.vertices);
  write_polygon_svg(stem.string() + ".svg", def.vertices);
}

// Dense task-loss evaluation over a 2-dimensional slice of the design box,
// other components held at theta0. No gradients are needed, so every rollout
// runs value-only. Cells that blow up are recorded as NaN.
struct LandscapeResult {
  int resolution = 0;
  std::vector<double> theta_a, theta_b;  // grid coordinates
  std::vector<double> loss;              // row-major [row * resolution + col]
  int failed_cells = 0;
};

inline LandscapeResult evaluate_landscape(const ScenarioSpec& spec, const LandscapeConfig& cfg,
                                          int jobs = 1) {
  if (cfg.dim_a == cfg.dim_b)
    throw ConfigError("landscape.dims", "the two slice dimensions must differ");
  if (cfg.dim_a < 0 || cfg.dim_a >= spec.d() || cfg.dim_b < 0 || cfg.dim_b >= spec.d())
    throw ConfigError("landscape.dims", "dimension index outside the design space");

  const double lo_a = cfg.min_a == 0.0 && cfg.max_a == 0.0 ? spec.theta0.lower_bounds[cfg.dim_a]
                                                           : cfg.min_a;
  const double hi_a = cfg.min_a == 0.0 && cfg.max_a == 0.0 ? spec.theta0.upper_bounds[cfg.dim_a]
                                                           : cfg.max_a;
  const double lo_b = cfg.min_b == 0.0 && cfg.max_b == 0.0 ? spec.theta0.lower_bounds[cfg.dim_b]
                                                           : cfg.min_b;
  const double hi_b = cfg.min_b == 0.0 && cfg.max_b == 0.0 ? spec.theta0.upper_bounds[cfg.dim_b]
                                                           : cfg.max_b;
  if (lo_a < spec.theta0.lower_bounds[cfg.dim_a] || hi_a > spec.theta0.upper_bounds[cfg.dim_a] ||
      lo_b < spec.theta0.lower_bounds[cfg.dim_b] || hi_b > spec.theta0.upper_bounds[cfg.dim_b])
    throw ConfigError("landscape", "slice range exceeds the design bounds");

  const int res = cfg.resolution;
  LandscapeResult out;
  out.resolution = res;
  out.theta_a.resize(static_cast<std::size_t>(res));
  out.theta_b.resize(static_cast<std::size_t>(res));
  for (int i = 0; i < res; ++i) {
    out.theta_a[static_cast<std::size_t>(i)] = lo_a + (hi_a - lo_a) * i / (res - 1);
    out.theta_b[static_cast<std::size_t>(i)] = lo_b + (hi_b - lo_b) * i / (res - 1);
  }
  out.loss.assign(static_cast<std::size_t>(res) * static_cast<std::size_t>(res), 0.0);

  const SimPipeline pipeline(spec);
  const TaskVariation var = sample_variation(spec, cfg.variation_seed, cfg.variation_index);
  std::vector<int> failures(static_cast<std::size_t>(res) * static_cast<std::size_t>(res), 0);

  parallel_for(res * res, jobs, [&](int cell) {
    const int row = cell / res, col = cell % res;
    Eigen::VectorXd theta = spec.theta0.values;
    theta[cfg.dim_a] = out.theta_a[static_cast<std::size_t>(row)];
    theta[cfg.dim_b] = out.theta_b[static_cast<std::size_t>(col)];
    try {
      out.loss[static_cast<std::size_t>(cell)] =
          pipeline.task_loss(theta, {}, var).value();
    } catch (const NumericalBlowup&) {
      out.loss[static_cast<std::size_t>(cell)] = std::nan("");
      failures[static_cast<std::size_t>(cell)] = 1;
    }
  });
  for (int f : failures) out.failed_cells += f;
  return out;
}

inline void write_landscape_csv(const std::filesystem::path& path, const LandscapeResult& grid) {
  CsvWriter csv(path, {"row", "col", "theta_a", "theta_b", "loss"});
  for (int row = 0; row < grid.resolution; ++row)
    for (int col = 0; col < grid.resolution; ++col)
      csv.row({std::to_string(row), std::to_string(col),
               fmt_double(grid.theta_a[static_cast<std::size_t>(row)]),
               fmt_double(grid.theta_b[static_cast<std::size_t>(col)]),
               fmt_double(grid.loss[static_cast<std::size_t>(row * grid.resolution + col)])});
}

// Normalized total variation of a landscape grid: sum of absolute
// differences between 4-neighbour cells divided by the value range.
inline double normalized_total_variation(const LandscapeResult& grid) {
  const int res = grid.resolution;
  double tv = 0.0, lo = grid.loss[0], hi = grid.loss[0];
  for (double v : grid.loss) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (int r = 0; r < res; ++r)
    for (int c = 0; c < res; ++c) {
      const double v = grid.loss[static_cast<std::size_t>(r * res + c)];
      if (c + 1 < res) tv += std::abs(grid.loss[static_cast<std::size_t>(r * res + c + 1)] - v);
      if (r + 1 < res) tv += std::abs(grid.loss[static_cast<std::size_t>((r + 1) * res + c)] - v);
    }
  const double range = hi - lo;
  return range > 0.0 ? tv / range : 0.0;
}

// Full protocol: seeded runs x algorithms, each trained on its own schedule
// and scored on the shared held-out test set; per-run and aggregate CSVs plus
// geometry exports land in cfg.out_dir.
inline EvaluationReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const ScenarioSpec& spec = cfg.spec;
  std::filesystem::create_directories(cfg.out_dir);

  {
    std::ofstream snapshot(cfg.out_dir / "config.json");
    if (!snapshot) throw IoError("cannot write config snapshot");
    snapshot << experiment_to_json(cfg).dump(2) << "\n";
  }

  const SimPipeline pipeline(spec);
  const std::vector<TaskVariation> test_set =
      sample_variations(spec, cfg.test_size, cfg.test_seed);
  const std::vector<std::uint64_t> seeds = cfg.resolved_train_seeds();

  // train/test hygiene: the per-variation seed streams must be disjoint
  {
    std::set<std::uint64_t> test_ids;
    for (const auto& v : test_set) test_ids.insert(v.seed);
    for (std::uint64_t s : seeds)
      for (const auto& v : sample_variations(spec, spec.N, s))
        if (test_ids.count(v.seed))
          throw ConfigError("test.seed", "held-out variation collides with a training one");
  }

  EvaluationReport report;
  const auto t_start = std::chrono::steady_clock::now();

  for (int r = 0; r < static_cast<int>(seeds.size()); ++r) {
    const BatchSchedule schedule = build_schedule(spec, seeds[static_cast<std::size_t>(r)]);
    for (const auto& algorithm : cfg.algorithms) {
      RunRecord rec;
      rec.run = r;
      rec.algorithm = algorithm;
      rec.seed = seeds[static_cast<std::size_t>(r)];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const OptimizerRun run = detail::dispatch_algorithm(
            algorithm, pipeline, schedule, cfg.optimizer, seeds[static_cast<std::size_t>(r)]);
        rec.theta = run.theta_final;
        rec.train_loss = run.history.empty() ? 0.0 : run.history.back().train_loss;
        const detail::TestScore score =
            detail::evaluate_on_test(pipeline, run.theta_final, test_set, cfg.optimizer.jobs);
        rec.test_mean_loss = score.mean_loss;
        rec.test_success_rate = score.success_rate;

        detail::write_history_csv(cfg.out_dir / ("history_" + algorithm + "_run" +
                                                 std::to_string(r) + ".csv"),
                                  algorithm, run, spec.d());
        export_geometry(run.theta_final, spec,
                        cfg.out_dir / ("geometry_" + algorithm + "_run" + std::to_string(r)));
      } catch (const Error& e) {
        std::cerr << "warning: run " << r << " of " << algorithm << " failed: " << e.what()
                  << "\n";
        rec.excluded = true;
        rec.theta = spec.theta0.values;
        ++report.warnings;
      }
      rec.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      report.runs.push_back(std::move(rec));
    }
  }

  // aggregates per algorithm over non-excluded runs
  for (const auto& algorithm : cfg.algorithms) {
    AlgorithmSummary summary;
    summary.algorithm = algorithm;
    std::vector<double> losses, rates;
    for (const auto& rec : report.runs) {
      if (rec.algorithm != algorithm) continue;
      if (rec.excluded) {
        ++summary.warnings;
        continue;
      }
      losses.push_back(rec.test_mean_loss);
      rates.push_back(rec.test_success_rate);
    }
    summary.runs_used = static_cast<int>(losses.size());
    std::tie(summary.mean_test_loss, summary.std_test_loss) = detail::mean_std(losses);
    std::tie(summary.mean_success_rate, summary.std_success_rate) = detail::mean_std(rates);
    report.summaries.push_back(std::move(summary));
  }
  report.wall_seconds_total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  // runs.csv: one row per (run, algorithm)
  {
    std::vector<std::string> header = {"run", "algorithm", "seed", "train_loss",
                                       "test_mean_loss", "test_success_rate", "excluded"};
    for (int k = 0; k < spec.d(); ++k) header.push_back("theta_" + std::to_string(k));
    CsvWriter csv(cfg.out_dir / "runs.csv", header);
    for (const auto& rec : report.runs) {
      std::vector<std::string> cells = {
          std::to_string(rec.run), rec.algorithm, std::to_string(rec.seed),
          fmt_double(rec.train_loss), fmt_double(rec.test_mean_loss),
          fmt_double(rec.test_success_rate), rec.excluded ? "1" : "0"};
      for (int k = 0; k < spec.d(); ++k) cells.push_back(fmt_double(rec.theta[k]));
      csv.row(cells);
    }
  }
  // aggregate.csv: one row per algorithm
  {
    CsvWriter csv(cfg.out_dir / "aggregate.csv",
                  {"algorithm", "runs_used", "mean_test_loss", "std_test_loss",
                   "mean_success_rate", "std_success_rate", "warnings"});
    for (const auto& s : report.summaries)
      csv.row({s.algorithm, std::to_string(s.runs_used), fmt_double(s.mean_test_loss),
               fmt_double(s.std_test_loss), fmt_double(s.mean_success_rate),
               fmt_double(s.std_success_rate), std::to_string(s.warnings)});
  }
  return report;
}

}  // namespace toolmorph
