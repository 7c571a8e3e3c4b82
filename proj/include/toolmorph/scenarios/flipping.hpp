#pragma once

#include <cmath>
#include <vector>

#include "toolmorph/dynamics.hpp"
#include "toolmorph/scenario.hpp"
#include "toolmorph/trajectory.hpp"

namespace toolmorph {

// Side view. A square box rests on the ground; a one-link kinematic finger
// carrying the deformed paddle sweeps through the scripted action sequence
// and pries the box over its far bottom corner. Channels: box angle phi,
// action u, finger tip (px, py).
inline Trajectory rollout_flipping(const ScenarioSpec& spec, const TaskVariation& var,
                                   const SeededPolygon& paddle_local,
                                   const WorldConfig& cfg) {
  const FlippingScene& sc = spec.flipping;
  const double half = sc.box_side / 2.0;

  BodyState box;
  box.mass = sc.box_mass;
  box.inertia = sc.box_mass * sc.box_side * sc.box_side / 6.0;
  const double tilt = var.angle * sc.tilt_scale / (M_PI / 2.0);
  // rest the lowest corner on the ground for the sampled tilt
  const double cy = half * (std::abs(std::cos(tilt)) + std::abs(std::sin(tilt)));
  box.position = {Dual::constant(sc.box_x0 + var.position.x()), Dual::constant(cy)};
  box.angle = Dual::constant(tilt);

  Trajectory traj(cfg.horizon);
  traj.declare_channel("phi");
  traj.declare_channel("u");
  traj.declare_channel("px");
  traj.declare_channel("py");
  traj.set_initial("box_px", Dual::constant(box.position.x.value()));
  traj.set_initial("box_py", Dual::constant(box.position.y.value()));
  if (cfg.record_debug) {
    traj.declare_channel("box_x");
    traj.declare_channel("box_y");
  }

  // Tip = the paddle vertex farthest along local +x (fixed index).
  std::size_t tip_index = 0;
  for (std::size_t i = 1; i < paddle_local.size(); ++i)
    if (paddle_local[i].x.value() > paddle_local[tip_index].x.value()) tip_index = i;

  const std::vector<double>& actions = spec.policy.actions.at(0);
  double q = sc.finger_angle0;

  WorldConfig ground_cfg = cfg;
  ground_cfg.contact_stiffness = sc.ground_stiffness;
  ground_cfg.contact_damping = sc.ground_damping;
  ground_cfg.friction_mu = sc.ground_mu;

  const Vec2 corners_local[4] = {{-half, -half}, {half, -half}, {half, half}, {-half, half}};

  for (int step = 1; step <= cfg.horizon; ++step) {
    const double u = actions[static_cast<std::size_t>(step - 1)];
    const double omega = u * sc.omega_max;
    q += omega * cfg.dt;

    const SeededPolygon paddle = transformed(paddle_local, q, sc.finger_base);

    BodyForces f;

    // box corners vs ground (half-plane y = 0)
    const Dual c = cos(box.angle), s = sin(box.angle);
    for (const Vec2& lc : corners_local) {
      const DualVec2 corner{box.position.x + c * Dual::constant(lc.x()) - s * Dual::constant(lc.y()),
                            box.position.y + s * Dual::constant(lc.x()) + c * Dual::constant(lc.y())};
      SignedDistance sd;
      sd.distance = corner.y;
      sd.normal = {Dual::constant(0.0), Dual::constant(1.0)};
      const DualVec2 v_rel = material_velocity(box, corner);
      const DualVec2 fc = penalty_force(sd, v_rel, ground_cfg);
      f.add_at(fc, corner, box.position);
    }

    // paddle vertices vs box: penalty acts on the box (the finger is kinematic)
    for (const auto& pv : paddle) {
      const SignedDistance sd =
          smooth_box_distance(pv, box.position, box.angle, half, half, sc.box_gamma);
      if (sd.distance.value() > 0.06) continue;  // force ~ exp(-beta/16), below rounding
      const DualVec2 v_paddle{Dual::constant(-omega) * (pv.y - Dual::constant(sc.finger_base.y())),
                              Dual::constant(omega) * (pv.x - Dual::constant(sc.finger_base.x()))};
      const DualVec2 v_rel = v_paddle - material_velocity(box, pv);
      // penalty_force returns the force on the point side (the paddle); the
      // box feels the opposite, applied at the paddle vertex
      const DualVec2 fp = penalty_force(sd, v_rel, cfg);
      f.add_at(-fp, pv, box.position);
    }

    step_body(box, f, cfg);
    check_finite(box, step, cfg, "flipping box");

    const DualVec2 tip = paddle[tip_index];
    traj.record("phi", box.angle);
    traj.record("u", Dual::constant(u));
    traj.record("px", tip.x);
    traj.record("py", tip.y);
    if (cfg.record_debug) {
      traj.record("box_x", box.position.x);
      traj.record("box_y", box.position.y);
    }
  }
  traj.check_complete();
  return traj;
}

}  // namespace toolmorph
