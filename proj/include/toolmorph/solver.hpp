#pragma once

#include <Eigen/Dense>
#include <functional>

namespace toolmorph {

// Objective evaluated at a point: value plus gradient over the same
// coordinates. Gradients come from forward-mode tangents upstream.
struct ObjectiveValue {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

using ObjectiveFn = std::function<ObjectiveValue(const Eigen::VectorXd&)>;

struct SolverOptions {
  int max_iters = 30;
  double grad_tol = 1e-6;
  double step_scale = 1.0;   // initial line-search trial step
  double armijo_c1 = 1e-4;
  int max_backtracks = 30;
};

struct SolverResult {
  Eigen::VectorXd theta;
  double value = 0.0;
  double grad_norm = 0.0;    // projected gradient norm at exit
  int iterations = 0;
  int evaluations = 0;
};

namespace detail {

inline Eigen::VectorXd project_box(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                                   const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Gradient components pointing out of the feasible box at an active bound do
// not count toward convergence.
inline double projected_grad_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                  const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  double norm2 = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    double gi = g[i];
    if (x[i] <= lo[i] && gi > 0.0) gi = 0.0;
    if (x[i] >= hi[i] && gi < 0.0) gi = 0.0;
    norm2 += gi * gi;
  }
  return std::sqrt(norm2);
}

}  // namespace detail

// Projected quasi-Newton minimization over a box: BFGS curvature, Armijo
// backtracking on the projected step, monotone by construction. Small and
// dense on purpose: the subspaces here never exceed nine dimensions.
inline SolverResult minimize_box(const ObjectiveFn& f, Eigen::VectorXd theta,
                                 const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                 const SolverOptions& opts = {}) {
  const int n = static_cast<int>(theta.size());
  SolverResult res;
  theta = detail::project_box(theta, lo, hi);

  ObjectiveValue cur = f(theta);
  ++res.evaluations;
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    res.grad_norm = detail::projected_grad_norm(theta, cur.gradient, lo, hi);
    if (res.grad_norm <= opts.grad_tol) break;

    Eigen::VectorXd dir = -(h_inv * cur.gradient);
    if (dir.dot(cur.gradient) >= 0.0) {  // curvature went bad; steepest descent
      h_inv.setIdentity();
      dir = -cur.gradient;
    }

    double t = opts.step_scale;
    Eigen::VectorXd candidate;
    ObjectiveValue next;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      candidate = detail::project_box(theta + t * dir, lo, hi);
      const Eigen::VectorXd actual_step = candidate - theta;
      if (actual_step.squaredNorm() == 0.0) break;  // pinned against the box
      next = f(candidate);
      ++res.evaluations;
      if (next.value <= cur.value + opts.armijo_c1 * cur.gradient.dot(actual_step)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;

    const Eigen::VectorXd s = candidate - theta;
    const Eigen::VectorXd y = next.gradient - cur.gradient;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
      h_inv = (eye - rho * s * y.transpose()) * h_inv * (eye - rho * y * s.transpose()) +
              rho * s * s.transpose();
    }

    theta = candidate;
    cur = next;
    ++res.iterations;
  }

  res.theta = theta;
  res.value = cur.value;
  res.grad_norm = detail::projected_grad_norm(theta, cur.gradient, lo, hi);
  return res;
}

}  // namespace toolmorph
