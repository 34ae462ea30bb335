#pragma once

#include <functional>

#include "softnet/common.hpp"

namespace softnet {

// Levenberg-Marquardt on r(x): minimize 0.5*||r(x)||^2.
// The callback fills residuals and, when jac != nullptr, the Jacobian
// (rows = residuals, cols = parameters).
struct LMOptions {
  int max_iterations = 200;
  double relative_tolerance = 1e-8;  // stop on relative residual change
  double initial_lambda = 1e-3;
};

struct LMResult {
  VecX x;
  double residual_norm = 0.0;  // ||r||
  int iterations = 0;
  bool converged = false;
};

using ResidualFn = std::function<void(const VecX& x, VecX& r, MatX* jac)>;

LMResult levenberg_marquardt(const ResidualFn& fn, const VecX& x0, int n_residuals,
                             const LMOptions& opts = {});

// Numerically differentiated variant for callbacks that cannot provide an
// analytic Jacobian (used by simulator calibration).
LMResult levenberg_marquardt_numeric(const std::function<void(const VecX&, VecX&)>& fn,
                                     const VecX& x0, int n_residuals, const LMOptions& opts = {},
                                     double fd_step = 1e-6);

}  // namespace softnet
