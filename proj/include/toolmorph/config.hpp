#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "toolmorph/continual.hpp"
#include "toolmorph/scenario.hpp"

namespace toolmorph {

using Json = nlohmann::json;

// Landscape slice request: a dense grid over two design dimensions with the
// rest held at theta0.
struct LandscapeConfig {
  int dim_a = 0;
  int dim_b = 1;
  double min_a = 0.0, max_a = 0.0;  // 0/0: use the box bounds
  double min_b = 0.0, max_b = 0.0;
  int resolution = 40;
  int variation_index = 0;
  std::uint64_t variation_seed = 5;
};

struct ExperimentConfig {
  ScenarioSpec spec;
  std::vector<std::string> algorithms = {"ours", "simple_continual", "baseline_diffhand"};
  int runs = 10;
  std::uint64_t seed_base = 1;
  std::vector<std::uint64_t> train_seeds;  // filled from seed_base when empty
  int test_size = 100;
  std::uint64_t test_seed = 900001;
  std::filesystem::path out_dir = "out";
  OptimizerConfig optimizer;
  LandscapeConfig landscape;

  std::vector<std::uint64_t> resolved_train_seeds() const {
    if (!train_seeds.empty()) return train_seeds;
    std::vector<std::uint64_t> out;
    out.reserve(static_cast<std::size_t>(runs));
    for (int r = 0; r < runs; ++r) out.push_back(seed_base + static_cast<std::uint64_t>(r));
    return out;
  }

  void validate() const {
    if (runs < 1) throw ConfigError("runs", "must be at least 1");
    if (test_size < 1) throw ConfigError("test.size", "must be at least 1");
    if (landscape.resolution < 2) throw ConfigError("landscape.resolution", "must be >= 2");
    if (algorithms.empty()) throw ConfigError("algorithms", "must not be empty");
    for (const auto& a : algorithms)
      if (a != "ours" && a != "simple_continual" && a != "baseline_diffhand")
        throw ConfigError("algorithms", "unknown algorithm '" + a + "'");
    for (std::uint64_t s : resolved_train_seeds())
      if (s == test_seed)
        throw ConfigError("test.seed", "collides with a training seed; the held-out set "
                                       "must come from a disjoint stream");
    spec.validate();
  }
};

namespace detail {

template <typename T>
T get_or(const Json& j, const std::string& key, T fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(path + "." + key, e.what());
  }
}

inline Eigen::VectorXd vector_from(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number())
      throw ConfigError(path + "[" + std::to_string(i) + "]", "expected a number");
    v[i] = j[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

inline Polygon polygon_from(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of [x, y] pairs");
  Polygon out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& p = j[i];
    if (!p.is_array() || p.size() != 2)
      throw ConfigError(path + "[" + std::to_string(i) + "]", "expected an [x, y] pair");
    out.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return out;
}

inline void apply_world(const Json& j, WorldConfig& world, const std::string& path) {
  world.dt = get_or(j, "dt", world.dt, path);
  world.contact_stiffness = get_or(j, "contact_stiffness", world.contact_stiffness, path);
  world.contact_damping = get_or(j, "contact_damping", world.contact_damping, path);
  world.friction_mu = get_or(j, "friction_mu", world.friction_mu, path);
  world.v_eps = get_or(j, "v_eps", world.v_eps, path);
  world.softplus_beta = get_or(j, "softplus_beta", world.softplus_beta, path);
  if (j.contains("gravity")) {
    const Eigen::VectorXd g = vector_from(j.at("gravity"), path + ".gravity");
    if (g.size() != 2) throw ConfigError(path + ".gravity", "expected 2 components");
    world.gravity = {g[0], g[1]};
  }
}

inline void apply_coeffs(const Json& j, LossCoefficients& c, const std::string& path) {
  c.c_u = get_or(j, "c_u", c.c_u, path);
  c.c_touch = get_or(j, "c_touch", c.c_touch, path);
  c.c_flip = get_or(j, "c_flip", c.c_flip, path);
  c.c_u_reach = get_or(j, "c_u_reach", c.c_u_reach, path);
  c.c_p_reach = get_or(j, "c_p_reach", c.c_p_reach, path);
  c.x_scoop = get_or(j, "x_scoop", c.x_scoop, path);
  c.y_scoop = get_or(j, "y_scoop", c.y_scoop, path);
  c.drop_tol = get_or(j, "drop_tol", c.drop_tol, path);
  c.angle_tol = get_or(j, "angle_tol", c.angle_tol, path);
}

inline void apply_cage(const Json& j, CageParameterization& cage, const std::string& path) {
  if (j.contains("base_cage")) cage.base_cage = polygon_from(j.at("base_cage"), path + ".base_cage");
  if (j.contains("theta0")) cage.theta0 = vector_from(j.at("theta0"), path + ".theta0");
  if (j.contains("jacobian")) {
    const Json& rows = j.at("jacobian");
    if (!rows.is_array() || rows.empty())
      throw ConfigError(path + ".jacobian", "expected a matrix (array of rows)");
    cage.jacobian.resize(static_cast<int>(rows.size()),
                         static_cast<int>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Eigen::VectorXd row = vector_from(rows[r], path + ".jacobian[" + std::to_string(r) + "]");
      if (row.size() != cage.jacobian.cols())
        throw ConfigError(path + ".jacobian", "ragged matrix rows");
      cage.jacobian.row(static_cast<int>(r)) = row.transpose();
    }
  }
}

inline void apply_policy(const Json& j, Policy& policy, const std::string& path) {
  if (j.contains("waypoints")) {
    const Polygon pts = polygon_from(j.at("waypoints"), path + ".waypoints");
    policy.waypoints.assign(pts.begin(), pts.end());
  }
  if (j.contains("actions")) {
    const Json& chans = j.at("actions");
    if (!chans.is_array()) throw ConfigError(path + ".actions", "expected an array of channels");
    policy.actions.clear();
    for (std::size_t c = 0; c < chans.size(); ++c) {
      const Eigen::VectorXd v = vector_from(chans[c], path + ".actions[" + std::to_string(c) + "]");
      policy.actions.emplace_back(v.data(), v.data() + v.size());
    }
  }
}

inline void apply_scenario_overrides(const Json& j, ScenarioSpec& spec,
                                     const std::string& path) {
  spec.N = get_or(j, "N", spec.N, path);
  spec.M = get_or(j, "M", spec.M, path);
  spec.dprime = get_or(j, "dprime", spec.dprime, path);
  spec.horizon = get_or(j, "H", spec.horizon, path);
  spec.world.horizon = spec.horizon;
  if (j.contains("theta0")) spec.theta0.values = vector_from(j.at("theta0"), path + ".theta0");
  if (j.contains("lower_bounds"))
    spec.theta0.lower_bounds = vector_from(j.at("lower_bounds"), path + ".lower_bounds");
  if (j.contains("upper_bounds"))
    spec.theta0.upper_bounds = vector_from(j.at("upper_bounds"), path + ".upper_bounds");
  if (j.contains("world")) apply_world(j.at("world"), spec.world, path + ".world");
  if (j.contains("coefficients")) apply_coeffs(j.at("coefficients"), spec.coeffs, path + ".coefficients");
  if (j.contains("cage")) apply_cage(j.at("cage"), spec.cage_param, path + ".cage");
  if (j.contains("boundary")) spec.base_boundary = polygon_from(j.at("boundary"), path + ".boundary");
  if (j.contains("policy")) apply_policy(j.at("policy"), spec.policy, path + ".policy");
  spec.world.horizon = spec.horizon;
}

}  // namespace detail

// Desk-scale task-set sizes; Table-I values stay available via overrides.N.
inline int desk_scale_n(ScenarioId id) {
  switch (id) {
    case ScenarioId::Winding: return 60;
    case ScenarioId::Flipping: return 40;
    case ScenarioId::Pushing: return 40;
    case ScenarioId::Reaching: return 1;
  }
  return 40;
}

inline ExperimentConfig experiment_from_json(const Json& j) {
  ExperimentConfig cfg;
  const std::string scenario = detail::get_or<std::string>(j, "scenario", "pushing", "");
  cfg.spec = default_spec(scenario_from_string(scenario));
  cfg.spec.N = desk_scale_n(cfg.spec.id);

  cfg.runs = detail::get_or(j, "runs", cfg.runs, "");
  cfg.seed_base = detail::get_or(j, "seed", cfg.seed_base, "");
  if (j.contains("train_seeds")) {
    for (const auto& s : j.at("train_seeds"))
      cfg.train_seeds.push_back(s.get<std::uint64_t>());
    cfg.runs = static_cast<int>(cfg.train_seeds.size());
  }
  if (j.contains("algorithms")) {
    cfg.algorithms.clear();
    for (const auto& a : j.at("algorithms")) cfg.algorithms.push_back(a.get<std::string>());
  }
  if (j.contains("test")) {
    cfg.test_size = detail::get_or(j.at("test"), "size", cfg.test_size, "test");
    cfg.test_seed = detail::get_or(j.at("test"), "seed", cfg.test_seed, "test");
  }
  cfg.out_dir = detail::get_or<std::string>(j, "out_dir", cfg.out_dir.string(), "");

  if (j.contains("optimizer")) {
    const Json& o = j.at("optimizer");
    cfg.optimizer.alpha = detail::get_or(o, "alpha", cfg.optimizer.alpha, "optimizer");
    cfg.optimizer.lr0 = detail::get_or(o, "lr0", cfg.optimizer.lr0, "optimizer");
    cfg.optimizer.inner_max_iters =
        detail::get_or(o, "inner_max_iters", cfg.optimizer.inner_max_iters, "optimizer");
    cfg.optimizer.grad_tol = detail::get_or(o, "grad_tol", cfg.optimizer.grad_tol, "optimizer");
    cfg.optimizer.baseline_max_iters =
        detail::get_or(o, "baseline_max_iters", cfg.optimizer.baseline_max_iters, "optimizer");
  }
  if (j.contains("overrides"))
    detail::apply_scenario_overrides(j.at("overrides"), cfg.spec, "overrides");

  if (j.contains("landscape")) {
    const Json& l = j.at("landscape");
    if (l.contains("dims")) {
      const Eigen::VectorXd dims = detail::vector_from(l.at("dims"), "landscape.dims");
      if (dims.size() != 2) throw ConfigError("landscape.dims", "expected two dimension indices");
      cfg.landscape.dim_a = static_cast<int>(dims[0]);
      cfg.landscape.dim_b = static_cast<int>(dims[1]);
    }
    cfg.landscape.min_a = detail::get_or(l, "min_a", cfg.landscape.min_a, "landscape");
    cfg.landscape.max_a = detail::get_or(l, "max_a", cfg.landscape.max_a, "landscape");
    cfg.landscape.min_b = detail::get_or(l, "min_b", cfg.landscape.min_b, "landscape");
    cfg.landscape.max_b = detail::get_or(l, "max_b", cfg.landscape.max_b, "landscape");
    cfg.landscape.resolution = detail::get_or(l, "resolution", cfg.landscape.resolution, "landscape");
    cfg.landscape.variation_index =
        detail::get_or(l, "variation_index", cfg.landscape.variation_index, "landscape");
    cfg.landscape.variation_seed =
        detail::get_or(l, "variation_seed", cfg.landscape.variation_seed, "landscape");
  }
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ConfigError(path.string(), std::string("JSON parse error: ") + e.what());
  }
  return experiment_from_json(j);
}

// Canonical snapshot of the resolved configuration, written next to results
// so a run can be reproduced from its output directory alone.
inline Json experiment_to_json(const ExperimentConfig& cfg) {
  Json j;
  j["scenario"] = to_string(cfg.spec.id);
  j["runs"] = cfg.runs;
  j["seed"] = cfg.seed_base;
  j["train_seeds"] = cfg.resolved_train_seeds();
  j["algorithms"] = cfg.algorithms;
  j["test"] = {{"size", cfg.test_size}, {"seed", cfg.test_seed}};
  j["out_dir"] = cfg.out_dir.string();
  j["optimizer"] = {{"alpha", cfg.optimizer.alpha},
                    {"lr0", cfg.optimizer.lr0},
                    {"inner_max_iters", cfg.optimizer.inner_max_iters},
                    {"grad_tol", cfg.optimizer.grad_tol},
                    {"baseline_max_iters", cfg.optimizer.baseline_max_iters},
                    {"jobs", cfg.optimizer.jobs}};
  Json ov;
  ov["N"] = cfg.spec.N;
  ov["M"] = cfg.spec.M;
  ov["dprime"] = cfg.spec.dprime;
  ov["H"] = cfg.spec.horizon;
  ov["theta0"] = std::vector<double>(cfg.spec.theta0.values.data(),
                                     cfg.spec.theta0.values.data() + cfg.spec.d());
  j["overrides"] = ov;
  j["landscape"] = {{"dims", {cfg.landscape.dim_a, cfg.landscape.dim_b}},
                    {"min_a", cfg.landscape.min_a},
                    {"max_a", cfg.landscape.max_a},
                    {"min_b", cfg.landscape.min_b},
                    {"max_b", cfg.landscape.max_b},
                    {"resolution", cfg.landscape.resolution},
                    {"variation_index", cfg.landscape.variation_index},
                    {"variation_seed", cfg.landscape.variation_seed}};
  return j;
}

}  // namespace toolmorph
