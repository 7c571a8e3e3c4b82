#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "toolmorph/errors.hpp"
#include "toolmorph/geometry.hpp"

namespace toolmorph {

enum class PolicyKind { CircularWinding, ZigZagPushing, OpenLoopFlipping, ReachingActions };

// Scripted open-loop policy data. Waypoint policies carry positions in scene
// units; action policies carry per-channel sequences with entries in [-1, 1].
// Reaching additionally carries the target points the loss tracks.
struct Policy {
  PolicyKind kind = PolicyKind::CircularWinding;
  std::vector<Vec2> waypoints;                   // ZigZagPushing path / Reaching targets
  std::vector<std::vector<double>> actions;      // per channel, length >= H

  void validate(int horizon) const {
    for (std::size_t c = 0; c < actions.size(); ++c) {
      if (static_cast<int>(actions[c].size()) < horizon)
        throw ConfigError("policy.actions[" + std::to_string(c) + "]",
                          "length " + std::to_string(actions[c].size()) +
                              " is shorter than horizon " + std::to_string(horizon));
      for (double u : actions[c])
        if (!(u >= -1.0 && u <= 1.0))
          throw ConfigError("policy.actions[" + std::to_string(c) + "]",
                            "action magnitude exceeds 1");
    }
    if (kind == PolicyKind::ZigZagPushing && waypoints.size() < 2)
      throw ConfigError("policy.waypoints", "zig-zag path needs at least 2 waypoints");
    if (kind == PolicyKind::ReachingActions && waypoints.empty())
      throw ConfigError("policy.waypoints", "reaching needs at least one target point");
  }

  // Piecewise-linear waypoint position at step tau of H (tau in [1, H]).
  Vec2 waypoint_at(int tau, int horizon) const {
    const double s = static_cast<double>(tau) / horizon *
                     static_cast<double>(waypoints.size() - 1);
    const int seg = std::min(static_cast<int>(s), static_cast<int>(waypoints.size()) - 2);
    const double f = s - seg;
    return (1.0 - f) * waypoints[static_cast<std::size_t>(seg)] +
           f * waypoints[static_cast<std::size_t>(seg) + 1];
  }

  // Piecewise-constant target point for step tau of H (Reaching "green dots").
  Vec2 target_at(int tau, int horizon) const {
    const int n = static_cast<int>(waypoints.size());
    int idx = (tau - 1) * n / horizon;
    idx = std::clamp(idx, 0, n - 1);
    return waypoints[static_cast<std::size_t>(idx)];
  }
};

}  // namespace toolmorph
