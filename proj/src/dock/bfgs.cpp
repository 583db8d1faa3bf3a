#include "sbdd/dock/bfgs.hpp"

#include <cmath>

#include "sbdd/error.hpp"

namespace sbdd::dock {

namespace {

double checked(double v, const Eigen::VectorXd& g) {
  if (!std::isfinite(v) || !g.allFinite()) throw NumericError("optimizer diverged: non-finite objective or gradient");
  return v;
}

}  // namespace

BfgsResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& opt) {
  const Eigen::Index n = x0.size();
  BfgsResult r;
  r.x = std::move(x0);
  r.grad.resize(n);
  r.f = checked(f(r.x, &r.grad), r.grad);
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  bool scaled = false;
  Eigen::VectorXd g_new(n);

  for (r.iters = 0; r.iters < opt.max_iters; ++r.iters) {
    if (n == 0 || r.grad.cwiseAbs().maxCoeff() < opt.grad_tol) {
      r.converged = true;
      break;
    }
    Eigen::VectorXd p = -h * r.grad;
    double slope = p.dot(r.grad);
    if (!(slope < 0.0)) {
      h.setIdentity();
      p = -r.grad;
      slope = p.dot(r.grad);
    }
    const double len = p.norm();
    if (len > opt.max_step) {
      p *= opt.max_step / len;
      slope *= opt.max_step / len;
    }

    double alpha = 1.0;
    Eigen::VectorXd x_new;
    double f_new = r.f;
    bool accepted = false;
    for (int b = 0; b < opt.max_backtracks; ++b) {
      x_new = r.x + alpha * p;
      f_new = f(x_new, nullptr);
      if (std::isfinite(f_new) && f_new <= r.f + opt.armijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // no decrease along the search direction; restart from steepest
      // descent once, otherwise we are at the resolution limit
      if (h.isIdentity()) break;
      h.setIdentity();
      continue;
    }
    f_new = checked(f(x_new, &g_new), g_new);
    const Eigen::VectorXd s = x_new - r.x;
    const Eigen::VectorXd y = g_new - r.grad;
    r.x = std::move(x_new);
    r.f = f_new;
    r.grad = g_new;

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
      if (!scaled) {
        h *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = h * y;
      h += rho * ((1.0 + rho * y.dot(hy)) * (s * s.transpose()) - (hy * s.transpose() + s * hy.transpose()));
    }
  }
  if (!r.converged && r.grad.size() > 0 && r.grad.cwiseAbs().maxCoeff() < opt.grad_tol) r.converged = true;
  return r;
}

}  // namespace sbdd::dock
