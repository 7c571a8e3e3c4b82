#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "toolmorph/errors.hpp"

namespace toolmorph {

using Vec2 = Eigen::Vector2d;
using Polygon = std::vector<Vec2>;  // closed implicitly, CCW

inline constexpr double kCageVertexTol = 1e-12;   // coincident-vertex threshold
inline constexpr double kInteriorMargin = 1e-9;   // strict interiority margin

// The design vector theta with box bounds. Units are scenario-specific
// (lengths/offsets in meters).
struct MorphParams {
  Eigen::VectorXd values;
  Eigen::VectorXd lower_bounds;
  Eigen::VectorXd upper_bounds;

  int dim() const { return static_cast<int>(values.size()); }

  bool within_bounds(double tol = 0.0) const {
    for (int k = 0; k < dim(); ++k)
      if (values[k] < lower_bounds[k] - tol || values[k] > upper_bounds[k] + tol)
        return false;
    return true;
  }

  void require_bounds() const {
    if (lower_bounds.size() != values.size() || upper_bounds.size() != values.size())
      throw ParamsOutOfBounds("bounds size does not match parameter dimension");
    if (!within_bounds())
      throw ParamsOutOfBounds("parameter values violate box bounds");
  }

  MorphParams with_values(const Eigen::VectorXd& v) const {
    return MorphParams{v, lower_bounds, upper_bounds};
  }
};

// Affine map from theta to cage vertices: cage(theta) = base + J (theta - theta0).
struct CageParameterization {
  Polygon base_cage;        // vertices at theta0, CCW
  Eigen::MatrixXd jacobian; // (2*|C|) x d, constant
  Eigen::VectorXd theta0;

  int num_vertices() const { return static_cast<int>(base_cage.size()); }
  int dim() const { return static_cast<int>(jacobian.cols()); }

  Polygon cage_at(const Eigen::VectorXd& theta) const {
    const Eigen::VectorXd delta = jacobian * (theta - theta0);
    Polygon out(base_cage.size());
    for (std::size_t j = 0; j < base_cage.size(); ++j)
      out[j] = base_cage[j] + Vec2(delta[2 * j], delta[2 * j + 1]);
    return out;
  }
};

namespace poly {

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

inline double boundary_distance(const Vec2& p, const Polygon& poly) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < poly.size(); ++j) {
    const Vec2& a = poly[j];
    const Vec2& b = poly[(j + 1) % poly.size()];
    d = std::min(d, point_segment_distance(p, a, b));
  }
  return d;
}

// Crossing-number test; points on the boundary are resolved by the caller's
// margin check, not here.
inline bool contains(const Vec2& p, const Polygon& poly) {
  bool inside = false;
  for (std::size_t j = 0, k = poly.size() - 1; j < poly.size(); k = j++) {
    const Vec2& a = poly[j];
    const Vec2& b = poly[k];
    const bool straddles = (a.y() > p.y()) != (b.y() > p.y());
    if (straddles && p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      inside = !inside;
  }
  return inside;
}

inline bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const double v = (q.x() - p.x()) * (r.y() - p.y()) - (q.y() - p.y()) * (r.x() - p.x());
    return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 != o2 && o3 != o4;
}

inline bool is_simple(const Polygon& poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // skip adjacent edges (they share a vertex)
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

inline double signed_area(const Polygon& poly) {
  double a = 0.0;
  for (std::size_t j = 0; j < poly.size(); ++j) {
    const Vec2& p = poly[j];
    const Vec2& q = poly[(j + 1) % poly.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

}  // namespace poly

// 2D mean value coordinates via the tangent-half-angle form
//   w_j ~ (tan(a_{j-1}/2) + tan(a_j/2)) / |c_j - x|
// normalized to sum to one. Requires x strictly inside the cage (the tangent
// formula degenerates on the boundary).
inline Eigen::VectorXd compute_mvc_weights(const Vec2& point, const Polygon& cage) {
  const int n = static_cast<int>(cage.size());
  if (n < 3) throw DegenerateCage("cage must have at least 3 vertices");
  for (int j = 0; j < n; ++j)
    if ((cage[j] - cage[(j + 1) % n]).norm() < kCageVertexTol)
      throw DegenerateCage("cage vertices " + std::to_string(j) + " and " +
                           std::to_string((j + 1) % n) + " coincide");

  if (!poly::contains(point, cage) ||
      poly::boundary_distance(point, cage) <= kInteriorMargin)
    throw PointOutsideCage("point is on or outside the cage boundary");

  std::vector<Vec2> s(n);
  std::vector<double> r(n), half_tan(n);
  for (int j = 0; j < n; ++j) {
    s[j] = cage[j] - point;
    r[j] = s[j].norm();
  }
  for (int j = 0; j < n; ++j) {
    const int k = (j + 1) % n;
    const double cross = s[j].x() * s[k].y() - s[j].y() * s[k].x();
    const double dot = s[j].dot(s[k]);
    const double numer = r[j] * r[k] - dot;  // >= 0
    if (std::abs(cross) < 1e-14 * r[j] * r[k]) {
      if (numer < 1e-14 * r[j] * r[k]) {
        half_tan[j] = 0.0;  // angle ~ 0: vertices seen in the same direction
      } else {
        // angle ~ pi: the point sits on the edge chord
        throw PointOutsideCage("point is collinear with a cage edge");
      }
    } else {
      half_tan[j] = numer / cross;
    }
  }

  Eigen::VectorXd w(n);
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    const int prev = (j + n - 1) % n;
    w[j] = (half_tan[prev] + half_tan[j]) / r[j];
    total += w[j];
  }
  w /= total;
  return w;
}

// A deformable tool: cage parameterization, dense boundary polygon and the
// frozen MVC weight matrix (|M| x |C|) computed at the base configuration.
struct ToolShape {
  CageParameterization cage;
  Polygon boundary;
  Eigen::MatrixXd weights;

  int num_boundary_vertices() const { return static_cast<int>(boundary.size()); }
};

inline ToolShape build_tool_shape(const Polygon& base_boundary,
                                  const CageParameterization& cage) {
  ToolShape shape;
  shape.cage = cage;
  shape.boundary = base_boundary;
  shape.weights.resize(static_cast<int>(base_boundary.size()), cage.num_vertices());
  for (std::size_t i = 0; i < base_boundary.size(); ++i) {
    try {
      shape.weights.row(static_cast<int>(i)) =
          compute_mvc_weights(base_boundary[i], cage.base_cage).transpose();
    } catch (const PointOutsideCage& e) {
      throw PointOutsideCage("boundary vertex " + std::to_string(i) + ": " + e.what(),
                             static_cast<int>(i));
    }
  }
  return shape;
}

// Degenerate parameterization where boundary vertices ARE the cage vertices
// (identity weights). Used by scenarios whose theta components are coordinates
// themselves (e.g. link lengths) rather than a deformed mesh.
inline ToolShape identity_tool_shape(const CageParameterization& cage) {
  ToolShape shape;
  shape.cage = cage;
  shape.boundary = cage.base_cage;
  shape.weights = Eigen::MatrixXd::Identity(cage.num_vertices(), cage.num_vertices());
  return shape;
}

// Deformed boundary plus the constant sensitivity block d(m_i)/d(theta):
// rows (2i, 2i+1) of `sensitivities` hold the 2 x d jacobian of vertex i.
struct DeformedShape {
  std::vector<Vec2> vertices;
  Eigen::MatrixXd sensitivities;  // (2*|M|) x d

  int dim() const { return static_cast<int>(sensitivities.cols()); }
};

inline DeformedShape deform(const ToolShape& shape, const MorphParams& params) {
  params.require_bounds();
  const Polygon cage_pts = shape.cage.cage_at(params.values);
  const int m = shape.num_boundary_vertices();
  const int c = shape.cage.num_vertices();
  const int d = shape.cage.dim();

  DeformedShape out;
  out.vertices.assign(m, Vec2::Zero());
  out.sensitivities = Eigen::MatrixXd::Zero(2 * m, d);
  for (int i = 0; i < m; ++i) {
    Vec2 v = Vec2::Zero();
    for (int j = 0; j < c; ++j) {
      const double w = shape.weights(i, j);
      v += w * cage_pts[j];
      out.sensitivities.row(2 * i) += w * shape.cage.jacobian.row(2 * j);
      out.sensitivities.row(2 * i + 1) += w * shape.cage.jacobian.row(2 * j + 1);
    }
    out.vertices[i] = v;
  }
  return out;
}

// Load-time sanity check: base cage simple and non-degenerate, and the affine
// map keeps it simple across a few random parameter draws within bounds.
inline void validate_cage(const CageParameterization& cage, const MorphParams& bounds,
                          int samples = 8) {
  const int n = cage.num_vertices();
  if (n < 3) throw DegenerateCage("cage must have at least 3 vertices");
  for (int j = 0; j < n; ++j)
    if ((cage.base_cage[j] - cage.base_cage[(j + 1) % n]).norm() < kCageVertexTol)
      throw DegenerateCage("base cage has coincident consecutive vertices");
  if (!poly::is_simple(cage.base_cage))
    throw DegenerateCage("base cage is self-intersecting");
  if (poly::signed_area(cage.base_cage) <= 0.0)
    throw DegenerateCage("base cage must be counter-clockwise");

  std::uint64_t state = 0x5bd1e995u;
  auto next01 = [&state]() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  };
  Eigen::VectorXd theta(bounds.dim());
  for (int s = 0; s < samples; ++s) {
    for (int k = 0; k < bounds.dim(); ++k)
      theta[k] = bounds.lower_bounds[k] +
                 (bounds.upper_bounds[k] - bounds.lower_bounds[k]) * next01();
    if (!poly::is_simple(cage.cage_at(theta)))
      throw DegenerateCage("cage self-intersects within parameter bounds");
  }
}

}  // namespace toolmorph
