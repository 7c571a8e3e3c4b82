#pragma once

#include <cmath>
#include <vector>

#include "toolmorph/dynamics.hpp"
#include "toolmorph/scenario.hpp"
#include "toolmorph/trajectory.hpp"

namespace toolmorph {

// Free-space two-link arm on a wall; theta components are the link lengths
// (carried by the identity tool shape as pseudo-vertex x coordinates). Joint
// velocities follow the scripted actions. Channels: actions (u1, u2) and the
// tip position (px, py). No contact anywhere, so the landscape is smooth.
inline Trajectory rollout_reaching(const ScenarioSpec& spec, const TaskVariation& var,
                                   const SeededPolygon& lengths,
                                   const WorldConfig& cfg) {
  const ReachingScene& sc = spec.reaching;
  const Dual l1 = lengths.at(0).x;
  const Dual l2 = lengths.at(1).x;

  double q1 = sc.q1_0 + var.angle;
  double q2 = sc.q2_0;
  const std::vector<double>& u1s = spec.policy.actions.at(0);
  const std::vector<double>& u2s = spec.policy.actions.at(1);

  Trajectory traj(cfg.horizon);
  traj.declare_channel("u1");
  traj.declare_channel("u2");
  traj.declare_channel("px");
  traj.declare_channel("py");

  for (int step = 1; step <= cfg.horizon; ++step) {
    const double u1 = u1s[static_cast<std::size_t>(step - 1)];
    const double u2 = u2s[static_cast<std::size_t>(step - 1)];
    q1 += u1 * sc.omega_max * cfg.dt;
    q2 += u2 * sc.omega_max * cfg.dt;

    const DualVec2 tip{
        Dual::constant(sc.base.x()) + l1 * Dual::constant(std::cos(q1)) +
            l2 * Dual::constant(std::cos(q1 + q2)),
        Dual::constant(sc.base.y()) + l1 * Dual::constant(std::sin(q1)) +
            l2 * Dual::constant(std::sin(q1 + q2))};

    traj.record("u1", Dual::constant(u1));
    traj.record("u2", Dual::constant(u2));
    traj.record("px", tip.x);
    traj.record("py", tip.y);
  }
  traj.check_complete();
  return traj;
}

}  // namespace toolmorph
