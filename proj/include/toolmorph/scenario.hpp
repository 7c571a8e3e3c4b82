#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "toolmorph/dynamics.hpp"
#include "toolmorph/geometry.hpp"
#include "toolmorph/policy.hpp"
#include "toolmorph/rng.hpp"

namespace toolmorph {

enum class ScenarioId { Winding, Flipping, Pushing, Reaching };

inline std::string to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::Winding: return "winding";
    case ScenarioId::Flipping: return "flipping";
    case ScenarioId::Pushing: return "pushing";
    case ScenarioId::Reaching: return "reaching";
  }
  return "?";
}

inline ScenarioId scenario_from_string(const std::string& s) {
  if (s == "winding") return ScenarioId::Winding;
  if (s == "flipping") return ScenarioId::Flipping;
  if (s == "pushing") return ScenarioId::Pushing;
  if (s == "reaching") return ScenarioId::Reaching;
  throw ConfigError("scenario", "unknown scenario '" + s + "'");
}

struct LossCoefficients {
  // Flipping (c_u = 5, c_flip = 50; c_touch steps to 0 at H/2)
  double c_u = 5.0;
  double c_touch = 1.0;
  double c_flip = 50.0;
  // Reaching (c_u = 0.1, c_p = 10)
  double c_u_reach = 0.1;
  double c_p_reach = 10.0;
  // Pushing scoop opening
  double x_scoop = 0.028;
  double y_scoop = 0.46;
  // Success thresholds
  double drop_tol = 0.05;   // m, winding
  double angle_tol = 0.1;   // rad, flipping
};

// Scene constants for the planar restatements. All lengths in meters.
struct WindingScene {
  int num_links = 15;
  double link_mass = 0.05;
  double link_radius = 0.008;
  double link_spacing = 0.033;
  double joint_stiffness = 1e4;
  double joint_damping = 10.0;
  double wrap_radius = 0.11;   // theta-independent drape radius
  double drape_offset = 0.62;  // rad, shifts the chain center past the top
  double surface_radius = 0.008;  // collision skin: discs on the boundary vertices
  double contact_gamma = 300.0;   // soft-min sharpness of the disc union
  int settle_steps = 400;      // wound-state prelude before tau = 0
  double settle_damping = 6.0; // 1/s velocity decay during the prelude
};

struct FlippingScene {
  double box_side = 0.10;
  double box_mass = 0.10;
  double box_x0 = 0.0;
  double offset_scale = 0.02;  // maps the [-2,2] position sample to meters
  double tilt_scale = 0.19;    // maps the [-pi/2,pi/2] orientation sample to rad
  Vec2 finger_base{0.15, 0.07};
  double finger_angle0 = 3.72;  // rad, paddle pointing down-left, tip clear of the box
  double omega_max = 4.6;       // rad/s per unit action
  double ground_stiffness = 1e4;
  double ground_damping = 30.0;
  double ground_mu = 0.8;
  double box_gamma = 300.0;  // soft-max sharpness of the box face distance
};

struct PushingScene {
  double pea_radius = 0.01;
  double pea_mass = 0.005;
  Vec2 region_center{0.0, 0.1575};
  double region_half = 0.07;
  double table_mu = 1.0;       // smoothed Coulomb drag against the table
  double table_g = 9.81;       // normal gravity used by the top-down drag
  double pusher_mass = 1.0;
  double pd_kp = 3000.0;
  double pd_kd = 110.0;
};

struct ReachingScene {
  Vec2 base{0.0, 0.20};
  double q1_0 = -0.4;
  double q2_0 = 0.8;
  double omega_max = 2.5;      // rad/s per unit action
  double pose_jitter = 0.3;    // rad, initial-pose variation half-range
};

// One scenario: Table-I sizes, the deformable tool, per-scenario loss
// coefficients, the scripted policy and the world the rollout runs in.
struct ScenarioSpec {
  ScenarioId id = ScenarioId::Pushing;
  int N = 100;       // sampled task set size
  int M = 5;         // batch size
  int dprime = 2;    // coordinate-descent block size
  int horizon = 200;
  MorphParams theta0;
  CageParameterization cage_param;
  Polygon base_boundary;  // empty => identity tool (theta components are coordinates)
  LossCoefficients coeffs;
  WorldConfig world;
  Policy policy;
  std::uint64_t rng_seed = 0;

  WindingScene winding;
  FlippingScene flipping;
  PushingScene pushing;
  ReachingScene reaching;

  int d() const { return theta0.dim(); }

  ToolShape make_tool_shape() const {
    return base_boundary.empty() ? identity_tool_shape(cage_param)
                                 : build_tool_shape(base_boundary, cage_param);
  }

  void validate() const {
    world.validate();
    policy.validate(horizon);
    if (M < 1 || N < 1) throw ConfigError("scenario.N/M", "must be positive");
    if (M > N) throw ConfigError("scenario.M", "batch size exceeds task set size");
    if (dprime < 1 || dprime > d())
      throw ConfigError("scenario.dprime", "must be in [1, d]");
    theta0.require_bounds();
    if (!base_boundary.empty()) validate_cage(cage_param, theta0);
  }
};

// One restricted MDP: a scenario plus one sampled initial state, reproducible
// from (rng_seed, index).
struct TaskVariation {
  const ScenarioSpec* spec = nullptr;
  int index = 0;
  std::uint64_t seed = 0;
  double angle = 0.0;   // winding: tool rotation; flipping: orientation sample;
                        // reaching: initial-pose jitter
  Vec2 position{0.0, 0.0};  // flipping: scaled center offset; pushing: pea start
};

inline TaskVariation sample_variation(const ScenarioSpec& spec, std::uint64_t rng_seed,
                                      int index) {
  TaskVariation v;
  v.spec = &spec;
  v.index = index;
  v.seed = Rng::mix(rng_seed, static_cast<std::uint64_t>(index));
  Rng rng(v.seed);
  switch (spec.id) {
    case ScenarioId::Winding:
      v.angle = rng.uniform(0.0, 2.0 * M_PI);
      break;
    case ScenarioId::Flipping: {
      const double a = rng.uniform(-2.0, 2.0);
      const double b = rng.uniform(-2.0, 2.0);
      v.position = Vec2(a, b) * spec.flipping.offset_scale;
      v.angle = rng.uniform(-M_PI / 2.0, M_PI / 2.0);
      break;
    }
    case ScenarioId::Pushing:
      v.position = spec.pushing.region_center +
                   Vec2(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)) *
                       spec.pushing.region_half;
      break;
    case ScenarioId::Reaching:
      v.angle = rng.uniform(-spec.reaching.pose_jitter, spec.reaching.pose_jitter);
      break;
  }
  return v;
}

inline std::vector<TaskVariation> sample_variations(const ScenarioSpec& spec, int count,
                                                    std::uint64_t rng_seed) {
  if (count < 1) throw ConfigError("count", "must be at least 1");
  std::vector<TaskVariation> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(sample_variation(spec, rng_seed, i));
  return out;
}

inline std::vector<TaskVariation> sample_variations(const ScenarioSpec& spec, int count) {
  return sample_variations(spec, count, spec.rng_seed);
}

namespace presets {

inline Polygon circle_polygon(int n, double radius) {
  Polygon p;
  for (int j = 0; j < n; ++j) {
    const double a = 2.0 * M_PI * j / n;
    p.emplace_back(radius * std::cos(a), radius * std::sin(a));
  }
  return p;
}

// Winding tool: 8 cage vertices on radial spokes, each theta component is the
// spoke length. The dense boundary is a circle that bulges toward whichever
// spokes grow.
inline ScenarioSpec winding_spec() {
  ScenarioSpec s;
  s.id = ScenarioId::Winding;
  s.N = 200;
  s.M = 5;
  s.dprime = 2;
  s.horizon = 200;

  const int d = 8;
  s.theta0.values = Eigen::VectorXd::Constant(d, 0.10);
  s.theta0.lower_bounds = Eigen::VectorXd::Constant(d, 0.05);
  s.theta0.upper_bounds = Eigen::VectorXd::Constant(d, 0.14);

  s.cage_param.base_cage.clear();
  s.cage_param.jacobian = Eigen::MatrixXd::Zero(2 * d, d);
  s.cage_param.theta0 = s.theta0.values;
  for (int k = 0; k < d; ++k) {
    const double a = 2.0 * M_PI * k / d;
    const Vec2 dir(std::cos(a), std::sin(a));
    s.cage_param.base_cage.push_back(0.10 * dir);
    s.cage_param.jacobian(2 * k, k) = dir.x();
    s.cage_param.jacobian(2 * k + 1, k) = dir.y();
  }
  s.base_boundary = circle_polygon(40, 0.06);

  s.world.dt = 1e-3;
  s.world.gravity = {0.0, -9.81};
  s.world.contact_stiffness = 1000.0;
  s.world.contact_damping = 10.0;
  s.world.friction_mu = 0.18;
  s.world.v_eps = 1e-2;
  s.world.softplus_beta = 200.0;
  s.world.horizon = s.horizon;

  s.policy.kind = PolicyKind::CircularWinding;  // the wind is encoded in the drape
  return s;
}

// Flipping paddle: a finger pointing +x in its local frame; nine cage
// vertices move along preset directions (thickness, taper, tip length).
inline ScenarioSpec flipping_spec() {
  ScenarioSpec s;
  s.id = ScenarioId::Flipping;
  s.N = 100;
  s.M = 5;
  s.dprime = 2;
  s.horizon = 200;

  const int d = 9;
  s.theta0.values = Eigen::VectorXd::Zero(d);
  s.theta0.lower_bounds = Eigen::VectorXd::Constant(d, -0.03);
  s.theta0.upper_bounds = Eigen::VectorXd::Constant(d, 0.04);

  s.cage_param.base_cage = {{-0.02, -0.035}, {0.05, -0.04}, {0.11, -0.035},
                            {0.15, -0.022},  {0.168, 0.0},  {0.15, 0.022},
                            {0.11, 0.035},   {0.05, 0.04},  {-0.02, 0.035}};
  const std::vector<Vec2> dirs = {{0.0, -1.0}, {0.0, -1.0}, {0.0, -1.0},
                                  {0.7, -0.7}, {1.0, 0.0},  {0.7, 0.7},
                                  {0.0, 1.0},  {0.0, 1.0},  {0.0, 1.0}};
  s.cage_param.jacobian = Eigen::MatrixXd::Zero(2 * d, d);
  s.cage_param.theta0 = s.theta0.values;
  for (int k = 0; k < d; ++k) {
    s.cage_param.jacobian(2 * k, k) = dirs[static_cast<std::size_t>(k)].x();
    s.cage_param.jacobian(2 * k + 1, k) = dirs[static_cast<std::size_t>(k)].y();
  }

  s.base_boundary = {{0.0, -0.02},   {0.04, -0.02},  {0.08, -0.018}, {0.11, -0.014},
                     {0.13, -0.007}, {0.138, 0.0},   {0.13, 0.007},  {0.11, 0.014},
                     {0.08, 0.018},  {0.04, 0.02},   {0.0, 0.02},    {-0.012, 0.0}};

  s.world.dt = 2e-3;
  s.world.gravity = {0.0, -9.81};
  s.world.contact_stiffness = 2000.0;  // paddle-box
  s.world.contact_damping = 10.0;
  s.world.friction_mu = 0.5;
  s.world.v_eps = 1e-2;
  s.world.softplus_beta = 600.0;
  s.world.horizon = s.horizon;

  s.policy.kind = PolicyKind::OpenLoopFlipping;
  // Steady clockwise sweep: the paddle stays engaged with the box face
  // through the whole pry, so the pivot is contact-stabilized.
  s.policy.actions = {std::vector<double>(static_cast<std::size_t>(s.horizon), -0.55)};
  return s;
}

// Pushing tool: rectangular pusher whose front profile is controlled by seven
// cage vertices sliding along the push direction.
inline ScenarioSpec pushing_spec() {
  ScenarioSpec s;
  s.id = ScenarioId::Pushing;
  s.N = 100;
  s.M = 5;
  s.dprime = 2;
  s.horizon = 200;

  const int d = 7;
  s.theta0.values = Eigen::VectorXd::Zero(d);
  s.theta0.lower_bounds = Eigen::VectorXd::Constant(d, -0.028);
  s.theta0.upper_bounds = Eigen::VectorXd::Constant(d, 0.028);

  // CCW cage: back edge, right flank, seven front stations (right to left),
  // left flank. theta_k moves front station k (left to right) along +y.
  s.cage_param.base_cage = {{-0.10, -0.07}, {0.0, -0.08},  {0.10, -0.07}, {0.11, 0.0},
                            {0.09, 0.05},   {0.06, 0.05},  {0.04, 0.05},  {0.02, 0.05},
                            {0.0, 0.05},    {-0.02, 0.05}, {-0.04, 0.05}, {-0.06, 0.05},
                            {-0.09, 0.05},  {-0.11, 0.0}};
  s.cage_param.jacobian = Eigen::MatrixXd::Zero(28, d);
  s.cage_param.theta0 = s.theta0.values;
  for (int k = 0; k < d; ++k) {
    const int cage_index = 11 - k;  // station k counted from the left
    s.cage_param.jacobian(2 * cage_index + 1, k) = 1.0;
  }
  // the outer stations drag the front corners and flanks along, so a uniform
  // recess cannot mint free containment wings out of fixed corner vertices
  s.cage_param.jacobian(2 * 12 + 1, 0) = 1.0;   // left front corner follows station 0
  s.cage_param.jacobian(2 * 13 + 1, 0) = 0.5;   // left flank, half gain
  s.cage_param.jacobian(2 * 4 + 1, 6) = 1.0;    // right front corner follows station 6
  s.cage_param.jacobian(2 * 3 + 1, 6) = 0.5;    // right flank, half gain

  // CCW boundary: back edge left to right, right side, dense front edge right
  // to left, left side.
  Polygon b;
  for (int i = 0; i <= 4; ++i) b.emplace_back(-0.075 + i * (0.15 / 4.0), -0.03);
  b.emplace_back(0.08, -0.02);
  b.emplace_back(0.08, 0.02);
  for (int i = 0; i <= 12; ++i) b.emplace_back(0.075 - i * (0.15 / 12.0), 0.03);
  b.emplace_back(-0.08, 0.02);
  b.emplace_back(-0.08, -0.02);
  s.base_boundary = b;

  s.world.dt = 2.5e-3;
  s.world.gravity = {0.0, 0.0};  // top-down view
  s.world.contact_stiffness = 150.0;
  s.world.contact_damping = 4.0;
  s.world.friction_mu = 0.12;
  s.world.softplus_beta = 4000.0;
  s.world.horizon = s.horizon;

  s.policy.kind = PolicyKind::ZigZagPushing;
  s.policy.waypoints = {{0.0, -0.08}, {0.015, 0.02}, {-0.015, 0.12}, {0.015, 0.22},
                        {-0.015, 0.32}, {0.0, 0.40}, {0.0, 0.55}};
  return s;
}

// Reaching arm: theta components are the two link lengths; the tool shape is
// the degenerate identity parameterization.
inline ScenarioSpec reaching_spec() {
  ScenarioSpec s;
  s.id = ScenarioId::Reaching;
  s.N = 1;
  s.M = 1;
  s.dprime = 1;
  s.horizon = 200;

  s.theta0.values = Eigen::VectorXd::Constant(2, 0.16);
  s.theta0.lower_bounds = Eigen::VectorXd::Constant(2, 0.08);
  s.theta0.upper_bounds = Eigen::VectorXd::Constant(2, 0.30);

  // Identity parameterization: pseudo-vertex j carries theta_j in its x slot.
  s.cage_param.base_cage = {{0.16, 0.0}, {0.16, 0.0}};
  s.cage_param.jacobian = Eigen::MatrixXd::Zero(4, 2);
  s.cage_param.jacobian(0, 0) = 1.0;
  s.cage_param.jacobian(2, 1) = 1.0;
  s.cage_param.theta0 = s.theta0.values;
  s.base_boundary.clear();  // identity tool shape

  s.world.dt = 2.5e-3;
  s.world.gravity = {0.0, 0.0};
  s.world.horizon = s.horizon;

  s.policy.kind = PolicyKind::ReachingActions;
  s.policy.waypoints = {{0.20, 0.32}, {0.26, 0.20}, {0.18, 0.08}};
  std::vector<double> u1(static_cast<std::size_t>(s.horizon)),
      u2(static_cast<std::size_t>(s.horizon));
  for (int t = 0; t < s.horizon; ++t) {
    const double f = static_cast<double>(t) / s.horizon;
    u1[static_cast<std::size_t>(t)] = 0.9 * std::sin(2.0 * M_PI * f - 0.4);
    u2[static_cast<std::size_t>(t)] = -0.8 * std::cos(2.0 * M_PI * f);
  }
  s.policy.actions = {u1, u2};
  return s;
}

}  // namespace presets

inline ScenarioSpec default_spec(ScenarioId id) {
  switch (id) {
    case ScenarioId::Winding: return presets::winding_spec();
    case ScenarioId::Flipping: return presets::flipping_spec();
    case ScenarioId::Pushing: return presets::pushing_spec();
    case ScenarioId::Reaching: return presets::reaching_spec();
  }
  throw ConfigError("scenario", "unknown scenario id");
}

}  // namespace toolmorph
