#pragma once

#include <span>
#include <string>
#include <vector>

#include "toolmorph/dual.hpp"
#include "toolmorph/errors.hpp"
#include "toolmorph/geometry.hpp"

namespace toolmorph {

// Integrator and smooth-contact parameters. Scenario presets override the
// stiffness/sharpness pair so the force tail stays well under the weight of
// the lightest body in the scene.
struct WorldConfig {
  Vec2 gravity{0.0, -9.81};
  double dt = 1e-3;              // s
  double contact_stiffness = 1e4;  // k_n, N/m
  double contact_damping = 10.0;   // N*s/m
  double friction_mu = 0.5;
  double v_eps = 1e-3;           // m/s, tanh friction smoothing
  double softplus_beta = 200.0;  // 1/m, contact activation sharpness
  int horizon = 200;             // H, steps
  double blowup_limit = 1e9;
  bool record_debug = false;

  void validate() const {
    if (dt <= 0.0) throw ConfigError("world.dt", "must be positive");
    if (contact_stiffness <= 0.0) throw ConfigError("world.contact_stiffness", "must be positive");
    if (friction_mu < 0.0) throw ConfigError("world.friction_mu", "must be nonnegative");
    if (horizon < 1) throw ConfigError("world.horizon", "must be at least 1");
  }
};

// Planar rigid body carrying tangents on every state variable.
struct BodyState {
  DualVec2 position;
  Dual angle;
  DualVec2 linear_velocity;
  Dual angular_velocity;
  double mass = 1.0;
  double inertia = 1.0;

  bool finite(double limit) const {
    auto ok = [limit](const Dual& d) {
      return d.finite() && std::abs(d.value()) <= limit;
    };
    return ok(position.x) && ok(position.y) && ok(angle) && ok(linear_velocity.x) &&
           ok(linear_velocity.y) && ok(angular_velocity);
  }
};

struct BodyForces {
  DualVec2 force{Dual::constant(0.0), Dual::constant(0.0)};
  Dual torque = Dual::constant(0.0);

  void add_at(const DualVec2& f, const DualVec2& point, const DualVec2& body_center) {
    force += f;
    torque += (point - body_center).cross(f);
  }
};

// Semi-implicit Euler: velocities first from accumulated forces, then
// positions from the new velocities. Tangents ride along through the duals.
inline void step_body(BodyState& body, const BodyForces& forces, const WorldConfig& cfg) {
  const Dual inv_m = Dual::constant(1.0 / body.mass);
  body.linear_velocity.x += Dual::constant(cfg.dt) * (forces.force.x * inv_m + cfg.gravity.x());
  body.linear_velocity.y += Dual::constant(cfg.dt) * (forces.force.y * inv_m + cfg.gravity.y());
  body.angular_velocity += Dual::constant(cfg.dt / body.inertia) * forces.torque;
  body.position.x += Dual::constant(cfg.dt) * body.linear_velocity.x;
  body.position.y += Dual::constant(cfg.dt) * body.linear_velocity.y;
  body.angle += Dual::constant(cfg.dt) * body.angular_velocity;
}

inline void check_finite(const BodyState& body, int step_index, const WorldConfig& cfg,
                         const std::string& what) {
  if (!body.finite(cfg.blowup_limit))
    throw NumericalBlowup(what + " diverged at step " + std::to_string(step_index) +
                              " (unstable stiffness/dt pairing?)",
                          step_index);
}

// Collision geometry with seeded tangents: each vertex is a dual pair whose
// tangent rows come from the deformation sensitivities d(m_i)/d(theta),
// restricted to the seed dimensions being differentiated.
using SeededPolygon = std::vector<DualVec2>;

inline SeededPolygon seed_shape(const DeformedShape& deformed,
                                std::span<const int> seed_dims) {
  const int d = deformed.dim();
  const int width = static_cast<int>(seed_dims.size());
  if (width > kMaxTangents)
    throw DimensionMismatch("cannot seed " + std::to_string(width) + " dimensions");
  for (int k : seed_dims)
    if (k < 0 || k >= d)
      throw DimensionMismatch("seed dimension " + std::to_string(k) +
                              " outside design dimension " + std::to_string(d));

  SeededPolygon out;
  out.reserve(deformed.vertices.size());
  std::array<double, kMaxTangents> tx{}, ty{};
  for (std::size_t i = 0; i < deformed.vertices.size(); ++i) {
    for (int k = 0; k < width; ++k) {
      tx[static_cast<std::size_t>(k)] = deformed.sensitivities(2 * static_cast<int>(i), seed_dims[k]);
      ty[static_cast<std::size_t>(k)] = deformed.sensitivities(2 * static_cast<int>(i) + 1, seed_dims[k]);
    }
    out.emplace_back(Dual::with_tangents(deformed.vertices[i].x(), {tx.data(), static_cast<std::size_t>(width)}),
                     Dual::with_tangents(deformed.vertices[i].y(), {ty.data(), static_cast<std::size_t>(width)}));
  }
  return out;
}

// Seed every design dimension (the Eq.-3 entry point).
inline SeededPolygon seed_shape(const DeformedShape& deformed) {
  std::vector<int> dims(static_cast<std::size_t>(deformed.dim()));
  for (std::size_t k = 0; k < dims.size(); ++k) dims[k] = static_cast<int>(k);
  return seed_shape(deformed, dims);
}

inline SeededPolygon transformed(const SeededPolygon& poly, double angle,
                                 const Vec2& translation) {
  const double c = std::cos(angle), s = std::sin(angle);
  SeededPolygon out;
  out.reserve(poly.size());
  for (const auto& v : poly)
    out.emplace_back(Dual::constant(c) * v.x - Dual::constant(s) * v.y + translation.x(),
                     Dual::constant(s) * v.x + Dual::constant(c) * v.y + translation.y());
  return out;
}

struct SignedDistance {
  Dual distance;   // negative inside
  DualVec2 normal; // unit, points out of the polygon
};

// Closest-feature signed distance to a simple polygon. The feature (edge or
// vertex) is selected by value comparison; the returned dual follows that
// feature's formula, so the derivative is exact away from the measure-zero
// equidistant set.
inline SignedDistance signed_distance_polygon(const DualVec2& p, const SeededPolygon& poly) {
  const std::size_t n = poly.size();
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_edge = 0;
  double best_t = 0.0;

  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = (j + 1) % n;
    const double ax = poly[j].x.value(), ay = poly[j].y.value();
    const double bx = poly[k].x.value(), by = poly[k].y.value();
    const double ex = bx - ax, ey = by - ay;
    const double len2 = ex * ex + ey * ey;
    double t = ((p.x.value() - ax) * ex + (p.y.value() - ay) * ey) / len2;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = p.x.value() - (ax + t * ex), dy = p.y.value() - (ay + t * ey);
    const double d2 = dx * dx + dy * dy;
    if (d2 < best) {
      best = d2;
      best_edge = j;
      best_t = t;
    }
  }

  // Inside test on plain values (crossing number).
  bool inside = false;
  for (std::size_t j = 0, k = n - 1; j < n; k = j++) {
    const double ax = poly[j].x.value(), ay = poly[j].y.value();
    const double bx = poly[k].x.value(), by = poly[k].y.value();
    const bool straddles = (ay > p.y.value()) != (by > p.y.value());
    if (straddles &&
        p.x.value() < (bx - ax) * (p.y.value() - ay) / (by - ay) + ax)
      inside = !inside;
  }

  const std::size_t j = best_edge, k = (j + 1) % n;
  DualVec2 closest;
  if (best_t <= 0.0) {
    closest = poly[j];
  } else if (best_t >= 1.0) {
    closest = poly[k];
  } else {
    // re-derive the projection as a dual so vertex motion is differentiated
    const DualVec2 e = poly[k] - poly[j];
    const Dual t = (p - poly[j]).dot(e) / e.squared_norm();
    closest = poly[j] + t * e;
  }

  DualVec2 diff = p - closest;
  Dual dist = sqrt(diff.squared_norm() + Dual::constant(1e-300));
  const double sign = inside ? -1.0 : 1.0;
  SignedDistance out;
  out.distance = Dual::constant(sign) * dist;
  if (inside) diff = -diff;
  const Dual inv = Dual::constant(1.0) / dist;
  out.normal = {diff.x * inv, diff.y * inv};
  return out;
}

// Smooth penalty response: softplus-relaxed normal spring, gated damping and
// tanh-smoothed Coulomb friction. Returns the force acting on the point side;
// the polygon side gets the opposite.
inline DualVec2 penalty_force(const SignedDistance& sd, const DualVec2& v_rel,
                              const WorldConfig& cfg) {
  const Dual pen = softplus(-sd.distance, cfg.softplus_beta);
  const Dual spring = Dual::constant(cfg.contact_stiffness) * pen;
  const Dual gate = sigmoid(Dual::constant(-cfg.softplus_beta) * sd.distance);
  const Dual v_n = v_rel.dot(sd.normal);
  const Dual normal_mag = spring - Dual::constant(cfg.contact_damping) * v_n * gate;

  const DualVec2 tangent = sd.normal.perp();
  const Dual v_t = v_rel.dot(tangent);
  const Dual friction_mag =
      Dual::constant(-cfg.friction_mu) * spring * tanh(v_t / Dual::constant(cfg.v_eps));

  return normal_mag * sd.normal + friction_mag * tangent;
}

// Convenience: force on a (possibly disc-shaped) point colliding with a
// static polygon. Smoothly vanishes out of contact.
inline DualVec2 contact_force(const DualVec2& point, const SeededPolygon& polygon,
                              const WorldConfig& cfg, const DualVec2& point_velocity = {},
                              double radius = 0.0) {
  SignedDistance sd = signed_distance_polygon(point, polygon);
  sd.distance = sd.distance - Dual::constant(radius);
  return penalty_force(sd, point_velocity, cfg);
}

// Signed distance to a smoothed union of discs of common radius centered on
// the polygon vertices (log-sum-exp soft minimum, sharpness gamma). Unlike
// the closest-feature polygon distance this is C-infinity everywhere, which
// keeps finite differences and forward tangents in lockstep even through long
// sliding contacts.
inline SignedDistance smooth_disc_union_distance(const DualVec2& p,
                                                 const SeededPolygon& centers,
                                                 double radius, double gamma) {
  double dmin = std::numeric_limits<double>::infinity();
  std::vector<double> plain(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double dx = p.x.value() - centers[i].x.value();
    const double dy = p.y.value() - centers[i].y.value();
    plain[i] = std::sqrt(dx * dx + dy * dy) - radius;
    dmin = std::min(dmin, plain[i]);
  }
  Dual acc = Dual::constant(0.0);
  DualVec2 grad{Dual::constant(0.0), Dual::constant(0.0)};
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (plain[i] - dmin > 30.0 / gamma) continue;  // exp underflows next to dmin
    const DualVec2 diff = p - centers[i];
    const Dual dist = sqrt(diff.squared_norm() + Dual::constant(1e-300));
    const Dual w = exp(Dual::constant(-gamma) * (dist - Dual::constant(radius + dmin)));
    acc += w;
    const Dual scale = w / dist;
    grad.x += diff.x * scale;
    grad.y += diff.y * scale;
  }
  SignedDistance out;
  out.distance = Dual::constant(dmin) - log(acc) / Dual::constant(gamma);
  const Dual gn = sqrt(grad.squared_norm() + Dual::constant(1e-300));
  out.normal = {grad.x / gn, grad.y / gn};
  return out;
}

// Signed distance of a point to an oriented box (half extents hx, hy) whose
// pose may carry tangents. Everything runs through duals, so derivatives
// w.r.t. box pose and point are exact along the selected branch.
inline SignedDistance signed_distance_box(const DualVec2& p, const DualVec2& center,
                                          const Dual& angle, double hx, double hy) {
  const Dual c = cos(angle), s = sin(angle);
  const DualVec2 rel = p - center;
  // rotate into box frame
  const DualVec2 local(c * rel.x + s * rel.y, Dual::constant(-1.0) * s * rel.x + c * rel.y);
  const Dual qx = abs(local.x) - Dual::constant(hx);
  const Dual qy = abs(local.y) - Dual::constant(hy);

  Dual dist;
  DualVec2 local_n;
  if (qx.value() > 0.0 || qy.value() > 0.0) {
    const Dual ox = max(qx, Dual::constant(0.0));
    const Dual oy = max(qy, Dual::constant(0.0));
    dist = sqrt(ox * ox + oy * oy + Dual::constant(1e-300));
    const Dual inv = Dual::constant(1.0) / dist;
    const double sx = local.x.value() >= 0.0 ? 1.0 : -1.0;
    const double sy = local.y.value() >= 0.0 ? 1.0 : -1.0;
    local_n = {Dual::constant(sx) * ox * inv, Dual::constant(sy) * oy * inv};
  } else {
    // inside: distance to the nearest face
    if (qx.value() > qy.value()) {
      dist = qx;
      local_n = {Dual::constant(local.x.value() >= 0.0 ? 1.0 : -1.0), Dual::constant(0.0)};
    } else {
      dist = qy;
      local_n = {Dual::constant(0.0), Dual::constant(local.y.value() >= 0.0 ? 1.0 : -1.0)};
    }
  }

  SignedDistance out;
  out.distance = dist;
  out.normal = {c * local_n.x - s * local_n.y, s * local_n.x + c * local_n.y};
  return out;
}

// Smooth convex-body distance: soft maximum (log-sum-exp) over the box's
// four face half-planes. Rounds the corners by ~ln(4)/gamma and is
// C-infinity in the point and the box pose.
inline SignedDistance smooth_box_distance(const DualVec2& p, const DualVec2& center,
                                          const Dual& angle, double hx, double hy,
                                          double gamma) {
  const Dual c = cos(angle), s = sin(angle);
  const DualVec2 rel = p - center;
  const Dual lx = c * rel.x + s * rel.y;
  const Dual ly = Dual::constant(-1.0) * s * rel.x + c * rel.y;

  const Dual face[4] = {lx - Dual::constant(hx), Dual::constant(-hx) - lx,
                        ly - Dual::constant(hy), Dual::constant(-hy) - ly};
  const DualVec2 local_n[4] = {{Dual::constant(1.0), Dual::constant(0.0)},
                               {Dual::constant(-1.0), Dual::constant(0.0)},
                               {Dual::constant(0.0), Dual::constant(1.0)},
                               {Dual::constant(0.0), Dual::constant(-1.0)}};
  double dmax = face[0].value();
  for (int i = 1; i < 4; ++i) dmax = std::max(dmax, face[i].value());

  Dual acc = Dual::constant(0.0);
  DualVec2 n_local{Dual::constant(0.0), Dual::constant(0.0)};
  for (int i = 0; i < 4; ++i) {
    const Dual w = exp(Dual::constant(gamma) * (face[i] - Dual::constant(dmax)));
    acc += w;
    n_local.x += w * local_n[i].x;
    n_local.y += w * local_n[i].y;
  }
  SignedDistance out;
  out.distance = Dual::constant(dmax) + log(acc) / Dual::constant(gamma);
  const Dual nn = sqrt(n_local.squared_norm() + Dual::constant(1e-300));
  const Dual nx = n_local.x / nn, ny = n_local.y / nn;
  out.normal = {c * nx - s * ny, s * nx + c * ny};
  return out;
}

// Stiff spring-damper joint between two points; returns the force on `a`.
inline DualVec2 joint_spring_force(const DualVec2& pa, const DualVec2& va,
                                   const DualVec2& pb, const DualVec2& vb,
                                   double rest_length, double stiffness, double damping) {
  const DualVec2 diff = pb - pa;
  const Dual dist = sqrt(diff.squared_norm() + Dual::constant(1e-300));
  const Dual inv = Dual::constant(1.0) / dist;
  const DualVec2 dir{diff.x * inv, diff.y * inv};
  const Dual stretch = dist - Dual::constant(rest_length);
  const Dual v_rel = (vb - va).dot(dir);
  const Dual mag = Dual::constant(stiffness) * stretch + Dual::constant(damping) * v_rel;
  return mag * dir;
}

// Velocity of a body-fixed material point.
inline DualVec2 material_velocity(const BodyState& body, const DualVec2& world_point) {
  const DualVec2 r = world_point - body.position;
  return {body.linear_velocity.x - body.angular_velocity * r.y,
          body.linear_velocity.y + body.angular_velocity * r.x};
}

}  // namespace toolmorph
