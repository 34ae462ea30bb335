#include "softnet/least_squares.hpp"

#include <cmath>

namespace softnet {

LMResult levenberg_marquardt(const ResidualFn& fn, const VecX& x0, int n_residuals,
                             const LMOptions& opts) {
  const int n = static_cast<int>(x0.size());
  VecX x = x0;
  VecX r(n_residuals);
  MatX jac(n_residuals, n);
  fn(x, r, &jac);
  double cost = 0.5 * r.squaredNorm();
  double lambda = opts.initial_lambda;

  LMResult out;
  out.x = x;
  out.residual_norm = std::sqrt(2.0 * cost);

  for (int it = 0; it < opts.max_iterations; ++it) {
    out.iterations = it + 1;
    MatX jtj = jac.transpose() * jac;
    VecX jtr = jac.transpose() * r;

    bool stepped = false;
    for (int trial = 0; trial < 25; ++trial) {
      MatX a = jtj;
      a.diagonal().array() += lambda * (jtj.diagonal().array() + 1e-12);
      VecX dx = a.ldlt().solve(-jtr);
      if (!dx.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      VecX x_new = x + dx;
      VecX r_new(n_residuals);
      fn(x_new, r_new, nullptr);
      const double cost_new = 0.5 * r_new.squaredNorm();
      if (cost_new < cost) {
        const double rel_change = (cost - cost_new) / std::max(cost, 1e-300);
        x = x_new;
        fn(x, r, &jac);
        cost = cost_new;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        out.x = x;
        out.residual_norm = std::sqrt(2.0 * cost);
        if (rel_change < opts.relative_tolerance) {
          out.converged = true;
          return out;
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) {
      // Damping saturated: no descent direction improves the cost.
      out.converged = true;
      return out;
    }
  }
  return out;
}

LMResult levenberg_marquardt_numeric(const std::function<void(const VecX&, VecX&)>& fn,
                                     const VecX& x0, int n_residuals, const LMOptions& opts,
                                     double fd_step) {
  ResidualFn wrapped = [&](const VecX& x, VecX& r, MatX* jac) {
    fn(x, r);
    if (jac) {
      VecX rp(n_residuals), rm(n_residuals);
      for (int j = 0; j < x.size(); ++j) {
        VecX xp = x, xm = x;
        const double h = fd_step * std::max(1.0, std::abs(x[j]));
        xp[j] += h;
        xm[j] -= h;
        fn(xp, rp);
        fn(xm, rm);
        jac->col(j) = (rp - rm) / (2.0 * h);
      }
    }
  };
  return levenberg_marquardt(wrapped, x0, n_residuals, opts);
}

}  // namespace softnet
