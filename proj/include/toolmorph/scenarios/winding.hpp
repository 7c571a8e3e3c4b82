#pragma once

#include <cmath>
#include <vector>

#include "toolmorph/dynamics.hpp"
#include "toolmorph/scenario.hpp"
#include "toolmorph/trajectory.hpp"

namespace toolmorph {

// Side view. The tool cross-section is held fixed at the sampled rotation;
// a chain of disc links is draped over it and dropped. The recorded channel
// is the chain's center-of-mass height h.
inline Trajectory rollout_winding(const ScenarioSpec& spec, const TaskVariation& var,
                                  const SeededPolygon& tool_local, const WorldConfig& cfg) {
  const WindingScene& sc = spec.winding;
  const SeededPolygon tool = transformed(tool_local, var.angle, Vec2(0.0, 0.0));

  // Drape: links along a circular arc centered on the tool, symmetric about
  // the top, ends hanging below the horizontal.
  const int n = sc.num_links;
  const double dphi = sc.link_spacing / sc.wrap_radius;
  const double phi0 = M_PI / 2.0 + sc.drape_offset + dphi * (n - 1) / 2.0;
  std::vector<BodyState> links(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double phi = phi0 - dphi * i;
    auto& b = links[static_cast<std::size_t>(i)];
    b.mass = sc.link_mass;
    b.inertia = 1.0;  // point-mass links, rotation unused
    b.position = {Dual::constant(sc.wrap_radius * std::cos(phi)),
                  Dual::constant(sc.wrap_radius * std::sin(phi))};
  }

  std::vector<BodyForces> forces(static_cast<std::size_t>(n));
  auto substep = [&](bool prelude, int step_index) {
    for (auto& f : forces) f = BodyForces{};
    for (int i = 0; i + 1 < n; ++i) {
      auto& a = links[static_cast<std::size_t>(i)];
      auto& b = links[static_cast<std::size_t>(i + 1)];
      const DualVec2 fj =
          joint_spring_force(a.position, a.linear_velocity, b.position, b.linear_velocity,
                             sc.link_spacing, sc.joint_stiffness, sc.joint_damping);
      forces[static_cast<std::size_t>(i)].force += fj;
      forces[static_cast<std::size_t>(i + 1)].force -= fj;
    }
    for (int i = 0; i < n; ++i) {
      auto& b = links[static_cast<std::size_t>(i)];
      SignedDistance sd =
          smooth_disc_union_distance(b.position, tool, sc.surface_radius, sc.contact_gamma);
      sd.distance = sd.distance - Dual::constant(sc.link_radius);
      forces[static_cast<std::size_t>(i)].force +=
          penalty_force(sd, b.linear_velocity, cfg);
    }
    const Dual settle = Dual::constant(1.0 - (prelude ? sc.settle_damping * cfg.dt : 0.0));
    for (int i = 0; i < n; ++i) {
      auto& b = links[static_cast<std::size_t>(i)];
      step_body(b, forces[static_cast<std::size_t>(i)], cfg);
      if (prelude) {
        b.linear_velocity.x *= settle;
        b.linear_velocity.y *= settle;
      }
    }
    check_finite(links[0], step_index, cfg, "winding chain");
    check_finite(links[static_cast<std::size_t>(n - 1)], step_index, cfg, "winding chain");
  };

  // Wind-up prelude: the chain settles onto the tool under extra damping.
  // tau = 0 is the wound state; h0 is read there and carries the settled
  // state's design sensitivity.
  for (int s = 0; s < sc.settle_steps; ++s) substep(true, s - sc.settle_steps);

  Dual h0 = Dual::constant(0.0);
  for (const auto& b : links) h0 += b.position.y;
  h0 = h0 / Dual::constant(static_cast<double>(n));

  Trajectory traj(cfg.horizon);
  traj.declare_channel("h");
  traj.set_initial("h0", h0);
  if (cfg.record_debug)
    for (int i = 0; i < n; ++i) {
      traj.declare_channel("link" + std::to_string(i) + "_x");
      traj.declare_channel("link" + std::to_string(i) + "_y");
    }

  for (int step = 1; step <= cfg.horizon; ++step) {
    substep(false, step);
    Dual h = Dual::constant(0.0);
    for (int i = 0; i < n; ++i) h += links[static_cast<std::size_t>(i)].position.y;
    h = h / Dual::constant(static_cast<double>(n));
    traj.record("h", h);
    if (cfg.record_debug)
      for (int i = 0; i < n; ++i) {
        traj.record("link" + std::to_string(i) + "_x",
                    links[static_cast<std::size_t>(i)].position.x);
        traj.record("link" + std::to_string(i) + "_y",
                    links[static_cast<std::size_t>(i)].position.y);
      }
  }
  traj.check_complete();
  return traj;
}

}  // namespace toolmorph
