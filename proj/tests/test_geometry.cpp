#include <catch2/catch.hpp>
#include <cmath>
#include <vector>

#include "toolmorph/geometry.hpp"
#include "toolmorph/rng.hpp"

using namespace toolmorph;

namespace {

// Independent extended-precision evaluation of the tangent-half-angle form,
// used as the oracle for the double-precision implementation.
std::vector<long double> mvc_reference(long double px, long double py,
                                       const Polygon& cage) {
  const int n = static_cast<int>(cage.size());
  std::vector<long double> sx(n), sy(n), r(n), t(n), w(n);
  for (int j = 0; j < n; ++j) {
    sx[j] = static_cast<long double>(cage[j].x()) - px;
    sy[j] = static_cast<long double>(cage[j].y()) - py;
    r[j] = sqrtl(sx[j] * sx[j] + sy[j] * sy[j]);
  }
  for (int j = 0; j < n; ++j) {
    const int k = (j + 1) % n;
    const long double cross = sx[j] * sy[k] - sy[j] * sx[k];
    const long double dot = sx[j] * sx[k] + sy[j] * sy[k];
    t[j] = (r[j] * r[k] - dot) / cross;
  }
  long double total = 0.0L;
  for (int j = 0; j < n; ++j) {
    w[j] = (t[(j + n - 1) % n] + t[j]) / r[j];
    total += w[j];
  }
  for (auto& v : w) v /= total;
  return w;
}

Polygon unit_square() {
  return {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
}

Polygon regular_polygon(int n, double radius, Vec2 center = {0, 0}) {
  Polygon p;
  for (int j = 0; j < n; ++j) {
    const double a = 2.0 * M_PI * j / n;
    p.push_back(center + radius * Vec2(std::cos(a), std::sin(a)));
  }
  return p;
}

// Star-shaped (generally non-convex) simple polygon around the origin.
Polygon random_star_polygon(Rng& rng, int n) {
  std::vector<double> angles(n);
  for (int j = 0; j < n; ++j) angles[j] = 2.0 * M_PI * (j + 0.2 + 0.6 * rng.uniform()) / n;
  Polygon p;
  for (int j = 0; j < n; ++j) {
    const double r = rng.uniform(0.5, 1.5);
    p.push_back(r * Vec2(std::cos(angles[j]), std::sin(angles[j])));
  }
  return p;
}

}  // namespace

TEST_CASE("unit square centroid weights are symmetric") {
  const auto w = compute_mvc_weights({0.5, 0.5}, unit_square());
  REQUIRE(w.size() == 4);
  for (int j = 0; j < 4; ++j) CHECK(w[j] == Approx(0.25).margin(1e-14));
}

TEST_CASE("asymmetric point in unit square matches extended-precision oracle") {
  const Vec2 p(0.25, 0.5);
  const auto w = compute_mvc_weights(p, unit_square());
  const auto ref = mvc_reference(0.25L, 0.5L, unit_square());
  for (int j = 0; j < 4; ++j)
    CHECK(w[j] == Approx(static_cast<double>(ref[j])).margin(1e-14));
  // and the formula's defining properties
  CHECK(std::abs(w.sum() - 1.0) < 1e-12);
  Vec2 rec = Vec2::Zero();
  const auto cage = unit_square();
  for (int j = 0; j < 4; ++j) rec += w[j] * cage[j];
  CHECK((rec - p).norm() < 1e-12);
}

TEST_CASE("partition of unity and linear reproduction on random cages") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 5 + static_cast<int>(rng.uniform_index(10));
    const bool convex = (trial % 2) == 0;
    Polygon cage = convex ? regular_polygon(n, rng.uniform(0.5, 2.0))
                          : random_star_polygon(rng, n);
    const double ang = rng.uniform(0.0, 2.0 * M_PI);
    const double rad = rng.uniform(0.0, 0.3) * (convex ? 1.0 : 0.5);
    const Vec2 p = rad * Vec2(std::cos(ang), std::sin(ang));

    const auto w = compute_mvc_weights(p, cage);
    CHECK(std::abs(w.sum() - 1.0) < 1e-12);
    Vec2 rec = Vec2::Zero();
    for (int j = 0; j < n; ++j) rec += w[j] * cage[j];
    CHECK((rec - p).norm() < 1e-10);
  }
}

TEST_CASE("points outside or on the cage are rejected") {
  const auto cage = unit_square();
  CHECK_THROWS_AS(compute_mvc_weights({1.5, 0.5}, cage), PointOutsideCage);
  CHECK_THROWS_AS(compute_mvc_weights({1.0, 0.5}, cage), PointOutsideCage);  // on edge
  CHECK_THROWS_AS(compute_mvc_weights({0.0, 0.0}, cage), PointOutsideCage);  // vertex
}

TEST_CASE("degenerate cages are rejected") {
  Polygon bad = {{0, 0}, {1, 0}, {1.0 + 1e-14, 1e-14}, {1, 1}, {0, 1}};
  bad[2] = bad[1];  // exact coincidence
  CHECK_THROWS_AS(compute_mvc_weights({0.5, 0.5}, bad), DegenerateCage);
}

TEST_CASE("build_tool_shape: nested squares") {
  CageParameterization cage;
  cage.base_cage = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  cage.jacobian = Eigen::MatrixXd::Zero(8, 2);
  cage.theta0 = Eigen::VectorXd::Zero(2);

  Polygon boundary = {{-0.4, -0.4}, {0.4, -0.4}, {0.4, 0.4}, {-0.4, 0.4}};
  const ToolShape shape = build_tool_shape(boundary, cage);

  for (int i = 0; i < 4; ++i) {
    CHECK(shape.weights.row(i).sum() == Approx(1.0).margin(1e-12));
    // nearest cage corner dominates
    int argmax = 0;
    shape.weights.row(i).maxCoeff(&argmax);
    CHECK(argmax == i);
  }
}

TEST_CASE("boundary vertex on cage edge reports the offending index") {
  CageParameterization cage;
  cage.base_cage = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  cage.jacobian = Eigen::MatrixXd::Zero(8, 1);
  cage.theta0 = Eigen::VectorXd::Zero(1);
  Polygon boundary = {{-0.4, -0.4}, {1.0, 0.0}, {0.4, 0.4}};
  try {
    build_tool_shape(boundary, cage);
    FAIL("expected PointOutsideCage");
  } catch (const PointOutsideCage& e) {
    CHECK(e.vertex_index == 1);
  }
}

TEST_CASE("dense circle in octagon reconstructs to 1e-10") {
  CageParameterization cage;
  cage.base_cage = regular_polygon(8, 1.0);
  cage.jacobian = Eigen::MatrixXd::Zero(16, 3);
  cage.theta0 = Eigen::VectorXd::Zero(3);

  Polygon circle = regular_polygon(64, 0.55);
  const ToolShape shape = build_tool_shape(circle, cage);
  double max_err = 0.0;
  for (int i = 0; i < 64; ++i) {
    Vec2 rec = Vec2::Zero();
    for (int j = 0; j < 8; ++j) rec += shape.weights(i, j) * cage.base_cage[j];
    max_err = std::max(max_err, (rec - circle[static_cast<std::size_t>(i)]).norm());
  }
  CHECK(max_err < 1e-10);
}

namespace {

// Octagonal cage whose vertices move radially, one parameter each.
ToolShape radial_octagon_tool() {
  CageParameterization cage;
  cage.base_cage = regular_polygon(8, 1.0);
  cage.jacobian = Eigen::MatrixXd::Zero(16, 8);
  for (int j = 0; j < 8; ++j) {
    const double a = 2.0 * M_PI * j / 8;
    cage.jacobian(2 * j, j) = std::cos(a);
    cage.jacobian(2 * j + 1, j) = std::sin(a);
  }
  cage.theta0 = Eigen::VectorXd::Ones(8);
  return build_tool_shape(regular_polygon(24, 0.6), cage);
}

MorphParams radial_params(const Eigen::VectorXd& v) {
  MorphParams p;
  p.values = v;
  p.lower_bounds = Eigen::VectorXd::Constant(8, 0.5);
  p.upper_bounds = Eigen::VectorXd::Constant(8, 1.5);
  return p;
}

}  // namespace

TEST_CASE("deform at theta0 reproduces the base boundary exactly") {
  const ToolShape shape = radial_octagon_tool();
  const auto out = deform(shape, radial_params(Eigen::VectorXd::Ones(8)));
  for (int i = 0; i < shape.num_boundary_vertices(); ++i)
    CHECK((out.vertices[static_cast<std::size_t>(i)] -
           shape.boundary[static_cast<std::size_t>(i)]).norm() < 1e-13);
}

TEST_CASE("translation column moves every vertex identically") {
  CageParameterization cage;
  cage.base_cage = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  cage.jacobian = Eigen::MatrixXd::Zero(8, 1);
  for (int j = 0; j < 4; ++j) cage.jacobian(2 * j, 0) = 1.0;  // uniform +x
  cage.theta0 = Eigen::VectorXd::Zero(1);
  const ToolShape shape =
      build_tool_shape(Polygon{{-0.3, -0.2}, {0.4, -0.1}, {0.1, 0.5}}, cage);

  MorphParams p;
  p.values = Eigen::VectorXd::Constant(1, 0.1);
  p.lower_bounds = Eigen::VectorXd::Constant(1, -1.0);
  p.upper_bounds = Eigen::VectorXd::Constant(1, 1.0);
  const auto out = deform(shape, p);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK((out.vertices[i] - shape.boundary[i] - Vec2(0.1, 0.0)).norm() < 1e-14);
    CHECK(out.sensitivities(2 * static_cast<int>(i), 0) == Approx(1.0).margin(1e-12));
    CHECK(out.sensitivities(2 * static_cast<int>(i) + 1, 0) == Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("sensitivities match finite differences and the map is affine") {
  const ToolShape shape = radial_octagon_tool();
  Rng rng(11);
  Eigen::VectorXd theta = Eigen::VectorXd::Ones(8);
  for (int k = 0; k < 8; ++k) theta[k] = rng.uniform(0.7, 1.3);

  const double h = 1e-4;
  const auto base = deform(shape, radial_params(theta));
  for (int k = 0; k < 8; ++k) {
    Eigen::VectorXd tp = theta, tm = theta;
    tp[k] += h;
    tm[k] -= h;
    const auto dp = deform(shape, radial_params(tp));
    const auto dm = deform(shape, radial_params(tm));
    for (int i = 0; i < shape.num_boundary_vertices(); ++i) {
      const Vec2 fd = (dp.vertices[static_cast<std::size_t>(i)] -
                       dm.vertices[static_cast<std::size_t>(i)]) / (2 * h);
      CHECK(std::abs(fd.x() - base.sensitivities(2 * i, k)) < 1e-8);
      CHECK(std::abs(fd.y() - base.sensitivities(2 * i + 1, k)) < 1e-8);
      // affine: second difference vanishes
      const Vec2 second = dp.vertices[static_cast<std::size_t>(i)] +
                          dm.vertices[static_cast<std::size_t>(i)] -
                          2.0 * base.vertices[static_cast<std::size_t>(i)];
      CHECK(second.norm() < 1e-12);
    }
  }
}

TEST_CASE("translation and scale equivariance of the deformed mesh") {
  Rng rng(23);
  const Polygon cage = regular_polygon(7, 1.2);
  const Polygon inner = regular_polygon(12, 0.5);
  const Vec2 shift(0.37, -1.21);
  const double scale = 1.9;

  for (std::size_t i = 0; i < inner.size(); ++i) {
    const Eigen::VectorXd w = compute_mvc_weights(inner[i], cage);

    Polygon shifted = cage, scaled = cage;
    for (auto& v : shifted) v += shift;
    for (auto& v : scaled) v *= scale;

    Vec2 rec_shift = Vec2::Zero(), rec_scale = Vec2::Zero();
    for (int j = 0; j < 7; ++j) {
      rec_shift += w[j] * shifted[static_cast<std::size_t>(j)];
      rec_scale += w[j] * scaled[static_cast<std::size_t>(j)];
    }
    CHECK((rec_shift - (inner[i] + shift)).norm() < 1e-12);
    CHECK((rec_scale - scale * inner[i]).norm() < 1e-12);
  }
  (void)rng;
}

TEST_CASE("out-of-bounds parameters are rejected") {
  const ToolShape shape = radial_octagon_tool();
  Eigen::VectorXd bad = Eigen::VectorXd::Ones(8);
  bad[3] = 2.0;
  CHECK_THROWS_AS(deform(shape, radial_params(bad)), ParamsOutOfBounds);
}

TEST_CASE("validate_cage flags self-intersection") {
  CageParameterization cage;
  cage.base_cage = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};  // bowtie
  cage.jacobian = Eigen::MatrixXd::Zero(8, 1);
  cage.theta0 = Eigen::VectorXd::Zero(1);
  MorphParams b;
  b.values = Eigen::VectorXd::Zero(1);
  b.lower_bounds = Eigen::VectorXd::Constant(1, -1.0);
  b.upper_bounds = Eigen::VectorXd::Constant(1, 1.0);
  CHECK_THROWS_AS(validate_cage(cage, b), DegenerateCage);
}
