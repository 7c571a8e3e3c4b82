#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>

#include "toolmorph/losses.hpp"
#include "toolmorph/rollout.hpp"
#include "toolmorph/scenario.hpp"

namespace toolmorph {

// Loss provider for the optimizers: per-variation task and distillation
// losses at a design point, differentiated over a chosen subset of
// dimensions. The simulator-backed implementation is below; tests substitute
// synthetic objectives.
class Pipeline {
 public:
  virtual ~Pipeline() = default;

  virtual int dim() const = 0;
  virtual const MorphParams& bounds() const = 0;

  virtual Dual task_loss(const Eigen::VectorXd& theta, std::span<const int> seed_dims,
                         const TaskVariation& var) const = 0;

  // Value-only rollout used as the frozen theta_{t-1} reference.
  virtual Trajectory reference(const Eigen::VectorXd& theta,
                               const TaskVariation& var) const = 0;

  virtual Dual distill_loss(const Eigen::VectorXd& theta, std::span<const int> seed_dims,
                            const TaskVariation& var, const Trajectory& ref) const = 0;
};

// Full chain: theta -> cage -> deformed boundary (with sensitivities) ->
// seeded rollout -> scenario loss. Holds a reference: the spec must be the
// same object the task variations were sampled from and must outlive the
// pipeline.
class SimPipeline final : public Pipeline {
 public:
  explicit SimPipeline(const ScenarioSpec& spec)
      : spec_(spec), tool_(spec.make_tool_shape()) {}

  int dim() const override { return spec_.d(); }
  const MorphParams& bounds() const override { return spec_.theta0; }

  const ScenarioSpec& spec() const { return spec_; }
  const ToolShape& tool() const { return tool_; }

  Trajectory roll(const Eigen::VectorXd& theta, std::span<const int> seed_dims,
                  const TaskVariation& var) const {
    const DeformedShape def = deform(tool_, spec_.theta0.with_values(theta));
    return rollout(var, seed_shape(def, seed_dims), spec_.policy, spec_.world);
  }

  Dual task_loss(const Eigen::VectorXd& theta, std::span<const int> seed_dims,
                 const TaskVariation& var) const override {
    return scenario_task_loss(spec_, roll(theta, seed_dims, var));
  }

  Trajectory reference(const Eigen::VectorXd& theta,
                       const TaskVariation& var) const override {
    return roll(theta, {}, var);
  }

  Dual distill_loss(const Eigen::VectorXd& theta, std::span<const int> seed_dims,
                    const TaskVariation& var, const Trajectory& ref) const override {
    return scenario_distill_loss(spec_, roll(theta, seed_dims, var), ref);
  }

 private:
  const ScenarioSpec& spec_;
  ToolShape tool_;
};

}  // namespace toolmorph
