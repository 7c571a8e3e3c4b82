#include <catch2/catch.hpp>
#include <cmath>
#include <vector>

#include "toolmorph/dynamics.hpp"
#include "toolmorph/trajectory.hpp"

using namespace toolmorph;

namespace {

SeededPolygon constant_polygon(const Polygon& poly) {
  SeededPolygon out;
  for (const auto& v : poly) out.emplace_back(Dual::constant(v.x()), Dual::constant(v.y()));
  return out;
}

}  // namespace

TEST_CASE("ballistic free fall matches the semi-implicit closed form") {
  WorldConfig cfg;
  cfg.dt = 0.01;
  BodyState body;
  body.position = {Dual::constant(0.0), Dual::constant(0.0)};
  const int steps = 100;
  for (int t = 0; t < steps; ++t) step_body(body, BodyForces{}, cfg);
  // y_n = -g dt^2 * n(n+1)/2 for semi-implicit Euler
  const double expected = -9.81 * cfg.dt * cfg.dt * (steps * (steps + 1)) / 2.0;
  CHECK(body.position.y.value() == Approx(expected).margin(1e-12));
}

TEST_CASE("no forces, no gravity: state is constant") {
  WorldConfig cfg;
  cfg.gravity = {0.0, 0.0};
  BodyState body;
  body.position = {Dual::constant(0.3), Dual::constant(-0.2)};
  body.angle = Dual::constant(0.7);
  for (int t = 0; t < 50; ++t) step_body(body, BodyForces{}, cfg);
  CHECK(body.position.x.value() == 0.3);
  CHECK(body.position.y.value() == -0.2);
  CHECK(body.angle.value() == 0.7);
}

TEST_CASE("penalty equilibrium penetration approaches m g / k_n") {
  WorldConfig cfg;
  cfg.dt = 1e-4;
  cfg.contact_stiffness = 1e4;
  cfg.contact_damping = 50.0;
  cfg.friction_mu = 0.0;
  cfg.softplus_beta = 5000.0;  // beta * delta ~ 5: softplus ~ hard max

  const SeededPolygon ground =
      constant_polygon({{-5.0, -1.0}, {5.0, -1.0}, {5.0, 0.0}, {-5.0, 0.0}});
  BodyState disc;
  disc.mass = 1.0;
  disc.position = {Dual::constant(0.0), Dual::constant(0.01)};
  for (int t = 0; t < 8000; ++t) {
    BodyForces f;
    f.force = contact_force(disc.position, ground, cfg, disc.linear_velocity);
    step_body(disc, f, cfg);
  }
  const double delta = -disc.position.y.value();
  const double expected = disc.mass * 9.81 / cfg.contact_stiffness;
  CHECK(delta == Approx(expected).epsilon(0.02));
}

TEST_CASE("contact force gradient w.r.t. a polygon vertex matches finite differences") {
  WorldConfig cfg;
  cfg.softplus_beta = 500.0;
  cfg.contact_stiffness = 1e3;
  cfg.friction_mu = 0.4;

  Polygon tri = {{-0.5, -0.5}, {0.6, -0.4}, {0.0, 0.7}};
  const Vec2 query(0.05, -0.38);  // just inside the bottom edge
  const DualVec2 vel(Dual::constant(0.13), Dual::constant(-0.21));

  auto force_at = [&](const Polygon& poly, int width) {
    SeededPolygon sp;
    for (std::size_t j = 0; j < poly.size(); ++j) {
      if (j == 1 && width > 0) {
        sp.emplace_back(Dual::seeded(poly[j].x(), 2, 0), Dual::seeded(poly[j].y(), 2, 1));
      } else {
        sp.emplace_back(Dual::constant(poly[j].x()), Dual::constant(poly[j].y()));
      }
    }
    return contact_force({Dual::constant(query.x()), Dual::constant(query.y())}, sp, cfg, vel);
  };

  const DualVec2 f = force_at(tri, 2);
  const double h = 1e-6;
  for (int axis = 0; axis < 2; ++axis) {
    Polygon plus = tri, minus = tri;
    plus[1][axis] += h;
    minus[1][axis] -= h;
    const DualVec2 fp = force_at(plus, 0), fm = force_at(minus, 0);
    const double fdx = (fp.x.value() - fm.x.value()) / (2 * h);
    const double fdy = (fp.y.value() - fm.y.value()) / (2 * h);
    CHECK(f.x.tangent(axis) == Approx(fdx).epsilon(1e-4).margin(1e-8));
    CHECK(f.y.tangent(axis) == Approx(fdy).epsilon(1e-4).margin(1e-8));
  }
}

TEST_CASE("force vanishes away from the polygon") {
  WorldConfig cfg;
  cfg.softplus_beta = 500.0;
  const SeededPolygon tri = constant_polygon({{-0.5, -0.5}, {0.5, -0.5}, {0.0, 0.5}});
  const DualVec2 far{Dual::seeded(3.0, 1, 0), Dual::constant(3.0)};
  const DualVec2 f = contact_force(far, tri, cfg, {});
  CHECK(std::abs(f.x.value()) < 1e-12);
  CHECK(std::abs(f.y.value()) < 1e-12);
  CHECK(std::abs(f.x.tangent(0)) < 1e-12);
}

TEST_CASE("energy drift of a falling spring chain stays under 1% over 1000 steps") {
  WorldConfig cfg;
  cfg.dt = 1e-3;
  cfg.friction_mu = 0.0;
  cfg.contact_damping = 0.0;

  const int links = 3;
  const double mass = 0.05, k = 1e4, rest = 0.03;
  std::vector<BodyState> chain(links);
  for (int i = 0; i < links; ++i) {
    chain[i].mass = mass;
    chain[i].position = {Dual::constant(i * rest), Dual::constant(0.0)};
  }
  // slight initial stretch so spring energy participates
  chain[2].position.x = Dual::constant(2 * rest + 0.005);

  auto energy = [&]() {
    double e = 0.0;
    for (const auto& b : chain) {
      e += 0.5 * mass *
           (b.linear_velocity.x.value() * b.linear_velocity.x.value() +
            b.linear_velocity.y.value() * b.linear_velocity.y.value());
      e += mass * 9.81 * b.position.y.value();
    }
    for (int i = 0; i + 1 < links; ++i) {
      const double dx = chain[i + 1].position.x.value() - chain[i].position.x.value();
      const double dy = chain[i + 1].position.y.value() - chain[i].position.y.value();
      const double stretch = std::sqrt(dx * dx + dy * dy) - rest;
      e += 0.5 * k * stretch * stretch;
    }
    return e;
  };

  const double e0 = energy();
  double max_drift = 0.0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<BodyForces> forces(links);
    for (int i = 0; i + 1 < links; ++i) {
      const DualVec2 f = joint_spring_force(chain[i].position, chain[i].linear_velocity,
                                            chain[i + 1].position, chain[i + 1].linear_velocity,
                                            rest, k, 0.0);
      forces[i].force += f;
      forces[i + 1].force -= f;
    }
    for (int i = 0; i < links; ++i) step_body(chain[i], forces[i], cfg);
    max_drift = std::max(max_drift, std::abs(energy() - e0));
  }
  // compare the drift against the mechanical energy scale actually reached
  const double scale =
      std::abs(e0) + 3 * mass * 9.81 * std::abs(chain[0].position.y.value());
  CHECK(max_drift / scale < 0.01);
}

TEST_CASE("seed_shape injects deformation sensitivities as tangents") {
  DeformedShape def;
  def.vertices = {{0.1, 0.2}, {0.3, 0.4}};
  def.sensitivities = Eigen::MatrixXd::Zero(4, 3);
  def.sensitivities(0, 1) = 1.0;  // vertex 0 x moves with theta_1
  def.sensitivities(3, 2) = 2.0;  // vertex 1 y moves with theta_2, gain 2

  const SeededPolygon sp = seed_shape(def);
  CHECK(sp[0].x.tangent(1) == 1.0);
  CHECK(sp[0].x.tangent(0) == 0.0);
  CHECK(sp[1].y.tangent(2) == 2.0);

  // zero jacobian -> all tangents zero
  DeformedShape flat;
  flat.vertices = {{0.0, 0.0}};
  flat.sensitivities = Eigen::MatrixXd::Zero(2, 3);
  const SeededPolygon zp = seed_shape(flat);
  for (int k = 0; k < 3; ++k) {
    CHECK(zp[0].x.tangent(k) == 0.0);
    CHECK(zp[0].y.tangent(k) == 0.0);
  }

  // restricted seeding follows the selected columns
  const std::vector<int> dims = {2};
  const SeededPolygon rp = seed_shape(def, dims);
  CHECK(rp[1].y.width() == 1);
  CHECK(rp[1].y.tangent(0) == 2.0);

  const std::vector<int> bad = {7};
  CHECK_THROWS_AS(seed_shape(def, bad), DimensionMismatch);
}

TEST_CASE("box signed distance: values, normals and pose derivatives") {
  const DualVec2 center{Dual::constant(0.0), Dual::constant(0.0)};
  const Dual angle = Dual::seeded(0.3, 1, 0);
  const DualVec2 p{Dual::constant(0.9), Dual::constant(0.1)};

  const SignedDistance sd = signed_distance_box(p, center, angle, 0.5, 0.3);
  const double h = 1e-7;
  auto value_at = [&](double a) {
    return signed_distance_box(p, center, Dual::constant(a), 0.5, 0.3).distance.value();
  };
  const double fd = (value_at(0.3 + h) - value_at(0.3 - h)) / (2 * h);
  CHECK(sd.distance.tangent(0) == Approx(fd).epsilon(1e-5));
  CHECK(sd.normal.squared_norm().value() == Approx(1.0).epsilon(1e-12));

  // interior point: distance negative, normal points to nearest face
  const DualVec2 q{Dual::constant(0.1), Dual::constant(0.25)};
  const SignedDistance in = signed_distance_box(q, center, Dual::constant(0.0), 0.5, 0.3);
  CHECK(in.distance.value() == Approx(-0.05));
  CHECK(in.normal.y.value() == Approx(1.0));
}

TEST_CASE("numerical blowup is reported with the step index") {
  WorldConfig cfg;
  BodyState body;
  body.position = {Dual::constant(2e9), Dual::constant(0.0)};
  try {
    check_finite(body, 17, cfg, "test body");
    FAIL("expected NumericalBlowup");
  } catch (const NumericalBlowup& e) {
    CHECK(e.step_index == 17);
  }
}

TEST_CASE("trajectory bookkeeping") {
  Trajectory traj(3);
  traj.declare_channel("h");
  for (int t = 0; t < 2; ++t) traj.record("h", Dual::constant(1.0));
  CHECK_THROWS_AS(traj.check_complete(), HorizonMismatch);
  traj.record("h", Dual::constant(1.0));
  traj.check_complete();
  CHECK(traj.channel("h").size() == 3);
  CHECK_THROWS_AS(traj.channel("missing"), MissingChannel);
  traj.set_initial("h0", 0.5);
  CHECK(traj.initial_value("h0") == 0.5);
}
