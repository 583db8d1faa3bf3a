#pragma once

#include <functional>

#include <Eigen/Dense>

namespace sbdd::dock {

/// f(x, grad) returns the objective and, when grad is non-null, writes the
/// gradient into it.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

struct BfgsOptions {
  int max_iters = 200;
  double grad_tol = 1e-6;  // stop when the infinity norm of the gradient falls below
  double armijo = 1e-4;
  int max_backtracks = 50;
  double max_step = 2.0;  // cap on the Euclidean length of one step
};

struct BfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  Eigen::VectorXd grad;
  int iters = 0;
  bool converged = false;
};

/// Dense BFGS on the inverse Hessian with Armijo backtracking. The returned
/// value never exceeds f(x0). Throws NumericError when the objective or
/// gradient becomes non-finite.
BfgsResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& opt = {});

}  // namespace sbdd::dock
