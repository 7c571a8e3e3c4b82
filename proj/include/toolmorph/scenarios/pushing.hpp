#pragma once

#include <cmath>
#include <vector>

#include "toolmorph/dynamics.hpp"
#include "toolmorph/scenario.hpp"
#include "toolmorph/trajectory.hpp"

namespace toolmorph {

// Top-down view, no in-plane gravity. The pusher (deformed polygon) tracks a
// zig-zag waypoint path under a stiff PD controller and shoves a pea disc
// toward the scoop opening at y_scoop. Channels: pea position (x, y).
inline Trajectory rollout_pushing(const ScenarioSpec& spec, const TaskVariation& var,
                                  const SeededPolygon& pusher_local,
                                  const WorldConfig& cfg) {
  const PushingScene& sc = spec.pushing;

  BodyState pea;
  pea.mass = sc.pea_mass;
  pea.position = {Dual::constant(var.position.x()), Dual::constant(var.position.y())};

  BodyState pusher;
  pusher.mass = sc.pusher_mass;
  const Vec2 start = spec.policy.waypoints.front();
  pusher.position = {Dual::constant(start.x()), Dual::constant(start.y())};

  Trajectory traj(cfg.horizon);
  traj.declare_channel("x");
  traj.declare_channel("y");
  if (cfg.record_debug) {
    traj.declare_channel("pusher_x");
    traj.declare_channel("pusher_y");
  }

  const double drag = sc.table_mu * sc.pea_mass * sc.table_g;

  SeededPolygon pusher_world;
  pusher_world.reserve(pusher_local.size());

  for (int step = 1; step <= cfg.horizon; ++step) {
    // PD tracking of the piecewise-linear waypoint path
    const Vec2 target = spec.policy.waypoint_at(step, cfg.horizon);
    const Vec2 target_next = spec.policy.waypoint_at(std::min(step + 1, cfg.horizon), cfg.horizon);
    const Vec2 target_vel = (target_next - target) / cfg.dt;

    BodyForces pusher_f;
    pusher_f.force.x = Dual::constant(sc.pd_kp) * (Dual::constant(target.x()) - pusher.position.x) +
                       Dual::constant(sc.pd_kd) * (Dual::constant(target_vel.x()) - pusher.linear_velocity.x);
    pusher_f.force.y = Dual::constant(sc.pd_kp) * (Dual::constant(target.y()) - pusher.position.y) +
                       Dual::constant(sc.pd_kd) * (Dual::constant(target_vel.y()) - pusher.linear_velocity.y);

    // pusher polygon in world frame (translation only; orientation is locked)
    pusher_world.clear();
    for (const auto& v : pusher_local)
      pusher_world.emplace_back(v.x + pusher.position.x, v.y + pusher.position.y);

    BodyForces pea_f;
    const DualVec2 v_rel{pea.linear_velocity.x - pusher.linear_velocity.x,
                         pea.linear_velocity.y - pusher.linear_velocity.y};
    const DualVec2 fc = contact_force(pea.position, pusher_world, cfg, v_rel, sc.pea_radius);
    pea_f.force += fc;
    pusher_f.force -= fc;

    // smoothed Coulomb drag against the table
    const Dual speed = sqrt(pea.linear_velocity.squared_norm() +
                            Dual::constant(cfg.v_eps * cfg.v_eps));
    const Dual drag_scale = Dual::constant(-drag) / speed;
    pea_f.force += DualVec2{drag_scale * pea.linear_velocity.x,
                            drag_scale * pea.linear_velocity.y};

    step_body(pea, pea_f, cfg);
    step_body(pusher, pusher_f, cfg);
    check_finite(pea, step, cfg, "pushing pea");
    check_finite(pusher, step, cfg, "pusher");

    traj.record("x", pea.position.x);
    traj.record("y", pea.position.y);
    if (cfg.record_debug) {
      traj.record("pusher_x", pusher.position.x);
      traj.record("pusher_y", pusher.position.y);
    }
  }
  traj.check_complete();
  return traj;
}

}  // namespace toolmorph
