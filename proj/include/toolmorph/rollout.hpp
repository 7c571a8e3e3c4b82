#pragma once

#include <span>

#include "toolmorph/dynamics.hpp"
#include "toolmorph/scenario.hpp"
#include "toolmorph/scenarios/flipping.hpp"
#include "toolmorph/scenarios/pushing.hpp"
#include "toolmorph/scenarios/reaching.hpp"
#include "toolmorph/scenarios/winding.hpp"
#include "toolmorph/trajectory.hpp"

namespace toolmorph {

// Single rollout of a task variation with the given deformed tool. Pure:
// repeated calls are bit-identical. Tangent width follows the seeded shape.
inline Trajectory rollout(const TaskVariation& var, const SeededPolygon& shape,
                          const Policy& policy, const WorldConfig& cfg) {
  const ScenarioSpec& spec = *var.spec;
  (void)policy;  // policies are scripted data owned by the spec
  switch (spec.id) {
    case ScenarioId::Winding: return rollout_winding(spec, var, shape, cfg);
    case ScenarioId::Flipping: return rollout_flipping(spec, var, shape, cfg);
    case ScenarioId::Pushing: return rollout_pushing(spec, var, shape, cfg);
    case ScenarioId::Reaching: return rollout_reaching(spec, var, shape, cfg);
  }
  throw ConfigError("scenario", "unknown scenario id");
}

inline Trajectory rollout(const TaskVariation& var, const DeformedShape& shape,
                          const Policy& policy, const WorldConfig& cfg,
                          std::span<const int> seed_dims) {
  return rollout(var, seed_shape(shape, seed_dims), policy, cfg);
}

inline Trajectory rollout(const TaskVariation& var, const DeformedShape& shape,
                          const Policy& policy, const WorldConfig& cfg) {
  return rollout(var, seed_shape(shape), policy, cfg);
}

}  // namespace toolmorph
