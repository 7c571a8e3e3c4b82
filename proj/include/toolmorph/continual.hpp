#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <numeric>
#include <set>
#include <vector>

#include "toolmorph/parallel.hpp"
#include "toolmorph/pipeline.hpp"
#include "toolmorph/rng.hpp"
#include "toolmorph/solver.hpp"

namespace toolmorph {

// Task set T plus its partition into batches of M. Batch entries are indices
// into `tasks`; the final batch is padded by resampling from T when N is not
// divisible by M.
struct BatchSchedule {
  std::vector<TaskVariation> tasks;
  std::vector<std::vector<int>> batches;
  int padded_count = 0;

  int num_batches() const { return static_cast<int>(batches.size()); }

  std::vector<TaskVariation> batch_tasks(int t) const {
    std::vector<TaskVariation> out;
    out.reserve(batches[static_cast<std::size_t>(t)].size());
    for (int idx : batches[static_cast<std::size_t>(t)])
      out.push_back(tasks[static_cast<std::size_t>(idx)]);
    return out;
  }
};

inline BatchSchedule build_schedule(const ScenarioSpec& spec, std::uint64_t seed) {
  BatchSchedule s;
  s.tasks = sample_variations(spec, spec.N, seed);

  std::vector<int> order(static_cast<std::size_t>(spec.N));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(Rng::mix(seed, 0x5c4edu));
  rng.shuffle(order);

  const int num_batches = (spec.N + spec.M - 1) / spec.M;
  for (int t = 0; t < num_batches; ++t) {
    std::vector<int> batch;
    for (int j = t * spec.M; j < (t + 1) * spec.M; ++j) {
      if (j < spec.N) {
        batch.push_back(order[static_cast<std::size_t>(j)]);
      } else {
        batch.push_back(static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(spec.N))));
        ++s.padded_count;
      }
    }
    s.batches.push_back(std::move(batch));
  }
  return s;
}

// Distillation task set D: M variations resampled (without replacement) from
// everything seen before the current batch.
struct DistillationSet {
  std::vector<TaskVariation> variations;
  std::vector<Trajectory> references;  // value-only rollouts at theta_{t-1}
};

inline std::vector<TaskVariation> sample_distillation(const BatchSchedule& schedule,
                                                      int upto_batch, int m,
                                                      std::uint64_t seed, int batch_index) {
  std::vector<int> seen;
  for (int t = 0; t < upto_batch; ++t)
    for (int idx : schedule.batches[static_cast<std::size_t>(t)]) seen.push_back(idx);
  std::vector<TaskVariation> out;
  if (seen.empty()) return out;
  Rng rng(Rng::mix(seed, 0xd157111u + static_cast<std::uint64_t>(batch_index)));
  rng.shuffle(seen);
  const int take = std::min<int>(m, static_cast<int>(seen.size()));
  out.reserve(static_cast<std::size_t>(take));
  for (int i = 0; i < take; ++i)
    out.push_back(schedule.tasks[static_cast<std::size_t>(seen[static_cast<std::size_t>(i)])]);
  return out;
}

// The d' unvisited coordinates with the largest gradient magnitude; ties go
// to the lower index. When fewer than d' remain the sweep finishes with the
// remainder.
inline std::vector<int> select_dimensions(const Eigen::VectorXd& grad,
                                          const std::set<int>& visited, int dprime) {
  std::vector<int> candidates;
  for (int k = 0; k < grad.size(); ++k)
    if (!visited.count(k)) candidates.push_back(k);
  if (candidates.empty())
    throw EmptyCandidate("all dimensions visited; restart the sweep first");
  std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    if (std::abs(grad[a]) != std::abs(grad[b])) return std::abs(grad[a]) > std::abs(grad[b]);
    return a < b;
  });
  if (static_cast<int>(candidates.size()) > dprime)
    candidates.resize(static_cast<std::size_t>(dprime));
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

struct OptimizerConfig {
  double alpha = 0.1;          // distillation weight
  double lr0 = 1.0;            // initial line-search step scale
  int inner_max_iters = 30;
  double grad_tol = 1e-6;
  int baseline_max_iters = 0;  // 0: inner_max_iters x num_batches
  int jobs = 1;                // parallel rollout workers inside batch losses
};

// Mean task loss over a batch; rollouts may run in parallel, aggregation is
// in variation order.
inline Dual batch_task_loss(const Pipeline& pipeline, const Eigen::VectorXd& theta,
                            std::span<const int> seed_dims,
                            const std::vector<TaskVariation>& batch, int jobs = 1) {
  std::vector<Dual> losses(batch.size());
  parallel_for(static_cast<int>(batch.size()), jobs, [&](int i) {
    losses[static_cast<std::size_t>(i)] =
        pipeline.task_loss(theta, seed_dims, batch[static_cast<std::size_t>(i)]);
  });
  Dual total = Dual::constant(0.0);
  for (const Dual& l : losses) total += l;
  return total / Dual::constant(static_cast<double>(batch.size()));
}

// Mean distillation loss over D against the cached theta_{t-1} references.
// Empty D (first batch) contributes exactly zero.
inline Dual batch_distill_loss(const Pipeline& pipeline, const Eigen::VectorXd& theta,
                               std::span<const int> seed_dims, const DistillationSet& distill,
                               int jobs = 1) {
  if (distill.variations.empty()) return Dual::constant(0.0);
  std::vector<Dual> losses(distill.variations.size());
  parallel_for(static_cast<int>(distill.variations.size()), jobs, [&](int i) {
    losses[static_cast<std::size_t>(i)] = pipeline.distill_loss(
        theta, seed_dims, distill.variations[static_cast<std::size_t>(i)],
        distill.references[static_cast<std::size_t>(i)]);
  });
  Dual total = Dual::constant(0.0);
  for (const Dual& l : losses) total += l;
  return total / Dual::constant(static_cast<double>(distill.variations.size()));
}

inline Dual combined_loss(const Pipeline& pipeline, const Eigen::VectorXd& theta,
                          std::span<const int> seed_dims,
                          const std::vector<TaskVariation>& batch,
                          const DistillationSet& distill, double alpha, int jobs = 1) {
  Dual loss = batch_task_loss(pipeline, theta, seed_dims, batch, jobs);
  if (alpha > 0.0 && !distill.variations.empty())
    loss += Dual::constant(alpha) * batch_distill_loss(pipeline, theta, seed_dims, distill, jobs);
  return loss;
}

struct BatchRecord {
  int batch = 0;                 // 1-based
  Eigen::VectorXd theta;         // after the batch
  double train_loss = 0.0;       // combined loss at exit
  double grad_norm = 0.0;
  double step_scale = 1.0;
  std::vector<int> active_dims;
  int inner_iterations = 0;
  bool skipped = false;
};

struct OptimizerRun {
  Eigen::VectorXd theta_final;
  std::vector<BatchRecord> history;
  int restarts = 0;
  int skipped_batches = 0;
};

namespace detail {

// Extract (value, gradient over seed_dims) from a dual loss.
inline ObjectiveValue to_objective(const Dual& loss, int width) {
  ObjectiveValue v;
  v.value = loss.value();
  v.gradient.resize(width);
  for (int k = 0; k < width; ++k) v.gradient[k] = loss.tangent(k);
  return v;
}

inline std::vector<int> all_dims(int d) {
  std::vector<int> dims(static_cast<std::size_t>(d));
  std::iota(dims.begin(), dims.end(), 0);
  return dims;
}

// Minimize the combined loss over the given coordinate block, others frozen.
inline SolverResult solve_block(const Pipeline& pipeline, const Eigen::VectorXd& theta_start,
                                const std::vector<int>& active,
                                const std::vector<TaskVariation>& batch,
                                const DistillationSet& distill, double alpha,
                                const SolverOptions& opts, int jobs, int* evals) {
  const MorphParams& bounds = pipeline.bounds();
  Eigen::VectorXd x0(active.size()), lo(active.size()), hi(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) {
    x0[static_cast<int>(i)] = theta_start[active[i]];
    lo[static_cast<int>(i)] = bounds.lower_bounds[active[i]];
    hi[static_cast<int>(i)] = bounds.upper_bounds[active[i]];
  }
  Eigen::VectorXd theta_full = theta_start;
  const ObjectiveFn objective = [&](const Eigen::VectorXd& x) {
    for (std::size_t i = 0; i < active.size(); ++i) theta_full[active[i]] = x[static_cast<int>(i)];
    const Dual loss = combined_loss(pipeline, theta_full, active, batch, distill, alpha, jobs);
    return to_objective(loss, static_cast<int>(active.size()));
  };
  SolverResult res = minimize_box(objective, x0, lo, hi, opts);
  if (evals) *evals += res.evaluations;
  return res;
}

}  // namespace detail

// The continual-learning optimizer: sequential batches, distillation
// regularization, gradient-magnitude coordinate selection without repeats,
// and a step-scale decay of e^-1 at every completed sweep.
inline OptimizerRun run_ours(const Pipeline& pipeline, const BatchSchedule& schedule,
                             const OptimizerConfig& cfg, std::uint64_t seed) {
  const int d = pipeline.dim();
  const int dprime = std::min(schedule.tasks.front().spec->dprime, d);

  OptimizerRun run;
  Eigen::VectorXd theta = pipeline.bounds().values;
  std::set<int> visited;
  double step_scale = cfg.lr0;

  for (int t = 1; t <= schedule.num_batches(); ++t) {
    const std::vector<TaskVariation> batch = schedule.batch_tasks(t - 1);

    DistillationSet distill;
    distill.variations = sample_distillation(schedule, t - 1, static_cast<int>(batch.size()),
                                             seed, t);
    BatchRecord rec;
    rec.batch = t;
    rec.step_scale = step_scale;
    try {
      distill.references.reserve(distill.variations.size());
      for (const auto& v : distill.variations)
        distill.references.push_back(pipeline.reference(theta, v));

      // gradient at theta_{t-1}; the distillation term vanishes at the anchor
      const std::vector<int> all = detail::all_dims(d);
      const Dual at_anchor =
          combined_loss(pipeline, theta, all, batch, distill, cfg.alpha, cfg.jobs);
      Eigen::VectorXd grad(d);
      for (int k = 0; k < d; ++k) grad[k] = at_anchor.tangent(k);

      rec.active_dims = select_dimensions(grad, visited, dprime);

      SolverOptions opts;
      opts.max_iters = cfg.inner_max_iters;
      opts.grad_tol = cfg.grad_tol;
      opts.step_scale = step_scale;
      int evals = 0;
      const SolverResult res = detail::solve_block(pipeline, theta, rec.active_dims, batch,
                                                   distill, cfg.alpha, opts, cfg.jobs, &evals);
      for (std::size_t i = 0; i < rec.active_dims.size(); ++i)
        theta[rec.active_dims[i]] = res.theta[static_cast<int>(i)];
      rec.train_loss = res.value;
      rec.grad_norm = res.grad_norm;
      rec.inner_iterations = res.iterations;
    } catch (const NumericalBlowup& e) {
      std::cerr << "warning: batch " << t << " skipped: " << e.what() << "\n";
      rec.skipped = true;
      ++run.skipped_batches;
    }

    if (!rec.skipped)
      for (int k : rec.active_dims) visited.insert(k);
    rec.theta = theta;
    run.history.push_back(rec);

    if (static_cast<int>(visited.size()) >= d) {
      visited.clear();
      ++run.restarts;
      step_scale = cfg.lr0 * std::exp(-static_cast<double>(run.restarts));
    }
  }
  run.theta_final = theta;
  return run;
}

// Baseline: optimize the first batch only, all dimensions at once, no
// distillation, until convergence (budget defaults to the same total number
// of inner iterations the sequential methods get).
inline OptimizerRun run_baseline_diffhand(const Pipeline& pipeline,
                                          const BatchSchedule& schedule,
                                          const OptimizerConfig& cfg) {
  OptimizerRun run;
  Eigen::VectorXd theta = pipeline.bounds().values;
  const std::vector<TaskVariation> batch = schedule.batch_tasks(0);
  DistillationSet empty;

  BatchRecord rec;
  rec.batch = 1;
  rec.step_scale = cfg.lr0;
  rec.active_dims = detail::all_dims(pipeline.dim());
  try {
    SolverOptions opts;
    opts.max_iters = cfg.baseline_max_iters > 0
                         ? cfg.baseline_max_iters
                         : cfg.inner_max_iters * schedule.num_batches();
    opts.grad_tol = cfg.grad_tol;
    opts.step_scale = cfg.lr0;
    const SolverResult res = detail::solve_block(pipeline, theta, rec.active_dims, batch,
                                                 empty, 0.0, opts, cfg.jobs, nullptr);
    theta = res.theta;
    rec.train_loss = res.value;
    rec.grad_norm = res.grad_norm;
    rec.inner_iterations = res.iterations;
  } catch (const NumericalBlowup& e) {
    std::cerr << "warning: baseline batch skipped: " << e.what() << "\n";
    rec.skipped = true;
    ++run.skipped_batches;
  }
  rec.theta = theta;
  run.history.push_back(rec);
  run.theta_final = theta;
  return run;
}

// Baseline: sequential batches, full-dimensional task-loss minimization, no
// distillation, no dimension selection.
inline OptimizerRun run_simple_continual(const Pipeline& pipeline,
                                         const BatchSchedule& schedule,
                                         const OptimizerConfig& cfg) {
  OptimizerRun run;
  Eigen::VectorXd theta = pipeline.bounds().values;
  DistillationSet empty;
  const std::vector<int> all = detail::all_dims(pipeline.dim());

  for (int t = 1; t <= schedule.num_batches(); ++t) {
    const std::vector<TaskVariation> batch = schedule.batch_tasks(t - 1);
    BatchRecord rec;
    rec.batch = t;
    rec.step_scale = cfg.lr0;
    rec.active_dims = all;
    try {
      SolverOptions opts;
      opts.max_iters = cfg.inner_max_iters;
      opts.grad_tol = cfg.grad_tol;
      opts.step_scale = cfg.lr0;
      const SolverResult res = detail::solve_block(pipeline, theta, all, batch, empty, 0.0,
                                                   opts, cfg.jobs, nullptr);
      theta = res.theta;
      rec.train_loss = res.value;
      rec.grad_norm = res.grad_norm;
      rec.inner_iterations = res.iterations;
    } catch (const NumericalBlowup& e) {
      std::cerr << "warning: batch " << t << " skipped: " << e.what() << "\n";
      rec.skipped = true;
      ++run.skipped_batches;
    }
    rec.theta = theta;
    run.history.push_back(rec);
  }
  run.theta_final = theta;
  return run;
}

}  // namespace toolmorph
