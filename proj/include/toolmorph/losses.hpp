#pragma once

#include <cmath>

#include "toolmorph/scenario.hpp"
#include "toolmorph/trajectory.hpp"

namespace toolmorph {

// Winding: sum over steps of the squared center-of-mass height drop,
// L = sum_tau (h_tau - h0)^2 with h0 read from the initial state.
inline Dual winding_task_loss(const Trajectory& traj) {
  const auto& h = traj.channel("h");
  const Dual& h0 = traj.initial("h0");
  Dual loss = Dual::constant(0.0);
  for (const Dual& ht : h) {
    const Dual gap = ht - h0;
    loss += gap * gap;
  }
  return loss;
}

inline void require_same_horizon(const Trajectory& a, const Trajectory& b) {
  if (a.horizon() != b.horizon())
    throw HorizonMismatch("trajectory horizons differ: " + std::to_string(a.horizon()) +
                          " vs " + std::to_string(b.horizon()));
}

// Winding distillation: mean squared height gap, (1/H) sum (h - h')^2.
inline Dual winding_distill_loss(const Trajectory& current, const Trajectory& reference) {
  require_same_horizon(current, reference);
  const auto& h = current.channel("h");
  const auto& href = reference.channel("h");
  Dual loss = Dual::constant(0.0);
  for (std::size_t t = 0; t < h.size(); ++t) {
    const Dual gap = h[t] - Dual::constant(href[t].value());
    loss += gap * gap;
  }
  return loss / Dual::constant(static_cast<double>(current.horizon()));
}

// Flipping: c_flip (phi_H - pi/2)^2 + sum_tau (c_u u^2 + c_touch |p - p_box|^2),
// with c_touch = 1 for tau < H/2 and 0 afterwards.
inline Dual flipping_task_loss(const Trajectory& traj, const LossCoefficients& coeffs) {
  const auto& phi = traj.channel("phi");
  const auto& u = traj.channel("u");
  const auto& px = traj.channel("px");
  const auto& py = traj.channel("py");
  const int H = traj.horizon();
  const Dual& bx = traj.initial("box_px");
  const Dual& by = traj.initial("box_py");

  const Dual flip_gap = phi.back() - Dual::constant(M_PI / 2.0);
  Dual loss = Dual::constant(coeffs.c_flip) * flip_gap * flip_gap;
  for (int t = 0; t < H; ++t) {
    const std::size_t i = static_cast<std::size_t>(t);
    loss += Dual::constant(coeffs.c_u) * u[i] * u[i];
    if (t + 1 < H / 2.0) {
      const Dual dx = px[i] - bx;
      const Dual dy = py[i] - by;
      loss += Dual::constant(coeffs.c_touch) * (dx * dx + dy * dy);
    }
  }
  return loss;
}

// Flipping distillation: (1/H) sum [(u - u')^2 + |p - p'|^2 + (phi - phi')^2].
inline Dual flipping_distill_loss(const Trajectory& current, const Trajectory& reference) {
  require_same_horizon(current, reference);
  const auto& u = current.channel("u");
  const auto& px = current.channel("px");
  const auto& py = current.channel("py");
  const auto& phi = current.channel("phi");
  const auto& ur = reference.channel("u");
  const auto& pxr = reference.channel("px");
  const auto& pyr = reference.channel("py");
  const auto& phir = reference.channel("phi");

  Dual loss = Dual::constant(0.0);
  for (std::size_t t = 0; t < u.size(); ++t) {
    const Dual du = u[t] - Dual::constant(ur[t].value());
    const Dual dx = px[t] - Dual::constant(pxr[t].value());
    const Dual dy = py[t] - Dual::constant(pyr[t].value());
    const Dual dphi = phi[t] - Dual::constant(phir[t].value());
    loss += du * du + dx * dx + dy * dy + dphi * dphi;
  }
  return loss / Dual::constant(static_cast<double>(current.horizon()));
}

// Pea x coordinate at evaluation time: the first crossing of y_scoop, else
// the final step. The crossing is interpolated in time so the result stays
// continuous in the design as the crossing slides across step boundaries.
inline Dual pushing_eval_coordinate(const Trajectory& traj, double y_scoop) {
  const auto& x = traj.channel("x");
  const auto& y = traj.channel("y");
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (y[t].value() >= y_scoop) {
      if (t == 0) return x[0];
      const Dual span = y[t] - y[t - 1];
      if (std::abs(span.value()) < 1e-12) return x[t];
      const Dual f = (Dual::constant(y_scoop) - y[t - 1]) / span;
      return x[t - 1] + f * (x[t] - x[t - 1]);
    }
  }
  return x.back();
}

// Quadratic hinge outside the scoop opening: 0 if |x| < x_scoop, else
// (|x| - x_scoop)^2. C1 at the boundary.
inline Dual pushing_task_loss(const Dual& x_tilde, double x_scoop) {
  const Dual a = abs(x_tilde);
  if (a.value() < x_scoop) return Dual::constant(0.0);
  const Dual excess = a - Dual::constant(x_scoop);
  return excess * excess;
}

// Pushing distillation: un-normalized sum of squared pea position gaps.
inline Dual pushing_distill_loss(const Trajectory& current, const Trajectory& reference) {
  require_same_horizon(current, reference);
  const auto& x = current.channel("x");
  const auto& y = current.channel("y");
  const auto& xr = reference.channel("x");
  const auto& yr = reference.channel("y");
  Dual loss = Dual::constant(0.0);
  for (std::size_t t = 0; t < x.size(); ++t) {
    const Dual dx = x[t] - Dual::constant(xr[t].value());
    const Dual dy = y[t] - Dual::constant(yr[t].value());
    loss += dx * dx + dy * dy;
  }
  return loss;
}

// Reaching: sum_tau c_u |u|^2 + c_p |p - p_hat| (the position term is an
// un-squared norm). Targets are the policy's point sequence.
inline Dual reaching_task_loss(const Trajectory& traj, const LossCoefficients& coeffs,
                               const Policy& policy) {
  const auto& u1 = traj.channel("u1");
  const auto& u2 = traj.channel("u2");
  const auto& px = traj.channel("px");
  const auto& py = traj.channel("py");
  const int H = traj.horizon();

  Dual loss = Dual::constant(0.0);
  for (int t = 1; t <= H; ++t) {
    const std::size_t i = static_cast<std::size_t>(t - 1);
    const Vec2 target = policy.target_at(t, H);
    loss += Dual::constant(coeffs.c_u_reach) * (u1[i] * u1[i] + u2[i] * u2[i]);
    const Dual dx = px[i] - Dual::constant(target.x());
    const Dual dy = py[i] - Dual::constant(target.y());
    loss += Dual::constant(coeffs.c_p_reach) *
            sqrt(dx * dx + dy * dy + Dual::constant(1e-300));
  }
  return loss;
}

inline Dual scenario_task_loss(const ScenarioSpec& spec, const Trajectory& traj) {
  switch (spec.id) {
    case ScenarioId::Winding: return winding_task_loss(traj);
    case ScenarioId::Flipping: return flipping_task_loss(traj, spec.coeffs);
    case ScenarioId::Pushing:
      return pushing_task_loss(pushing_eval_coordinate(traj, spec.coeffs.y_scoop),
                               spec.coeffs.x_scoop);
    case ScenarioId::Reaching: return reaching_task_loss(traj, spec.coeffs, spec.policy);
  }
  throw MissingChannel("unknown scenario");
}

// Reaching has no continual run; the trajectory discrepancy over the tip
// track keeps the distillation interface total.
inline Dual reaching_distill_loss(const Trajectory& current, const Trajectory& reference) {
  require_same_horizon(current, reference);
  const auto& px = current.channel("px");
  const auto& py = current.channel("py");
  const auto& pxr = reference.channel("px");
  const auto& pyr = reference.channel("py");
  Dual loss = Dual::constant(0.0);
  for (std::size_t t = 0; t < px.size(); ++t) {
    const Dual dx = px[t] - Dual::constant(pxr[t].value());
    const Dual dy = py[t] - Dual::constant(pyr[t].value());
    loss += dx * dx + dy * dy;
  }
  return loss / Dual::constant(static_cast<double>(current.horizon()));
}

inline Dual scenario_distill_loss(const ScenarioSpec& spec, const Trajectory& current,
                                  const Trajectory& reference) {
  switch (spec.id) {
    case ScenarioId::Winding: return winding_distill_loss(current, reference);
    case ScenarioId::Flipping: return flipping_distill_loss(current, reference);
    case ScenarioId::Pushing: return pushing_distill_loss(current, reference);
    case ScenarioId::Reaching: return reaching_distill_loss(current, reference);
  }
  throw MissingChannel("unknown scenario");
}

// Success predicates (Fig.-5-style accounting): winding keeps the chain high,
// flipping ends within angle_tol of a quarter turn, pushing lands the pea
// strictly inside the opening.
inline bool success(const ScenarioSpec& spec, const Trajectory& traj) {
  switch (spec.id) {
    case ScenarioId::Winding: {
      const double hH = traj.channel("h").back().value();
      return hH >= traj.initial_value("h0") - spec.coeffs.drop_tol;
    }
    case ScenarioId::Flipping: {
      const double phiH = traj.channel("phi").back().value();
      return std::abs(phiH - M_PI / 2.0) <= spec.coeffs.angle_tol;
    }
    case ScenarioId::Pushing: {
      const double xt = pushing_eval_coordinate(traj, spec.coeffs.y_scoop).value();
      return std::abs(xt) < spec.coeffs.x_scoop;
    }
    case ScenarioId::Reaching:
      return true;
  }
  return false;
}

}  // namespace toolmorph
