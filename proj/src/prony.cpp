#include "softnet/prony.hpp"

#include <algorithm>
#include <cmath>

#include "softnet/least_squares.hpp"

namespace softnet {

namespace {

double softplus(double x) {
  if (x > 30.0) return x;
  return std::log1p(std::exp(x));
}

double softplus_inv(double y) {
  y = std::max(y, 1e-12);
  if (y > 30.0) return y;
  return std::log(std::expm1(y));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void PronySeries::validate() const {
  if (!(base > 0.0)) throw DomainError("PronySeries: base must be > 0");
  if (branch_coeffs.size() != branch_times.size())
    throw DomainError("PronySeries: coeff/time length mismatch");
  for (double c : branch_coeffs)
    if (c < 0.0) throw DomainError("PronySeries: negative branch coefficient");
  double prev = 0.0;
  for (double t : branch_times) {
    if (!(t > 0.0)) throw DomainError("PronySeries: branch time must be > 0");
    if (t <= prev) throw DomainError("PronySeries: branch times must be strictly increasing");
    prev = t;
  }
}

void PronySeries::canonicalize() {
  const std::size_t n = branch_coeffs.size();
  if (branch_times.size() != n) throw DomainError("PronySeries: coeff/time length mismatch");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return branch_times[a] < branch_times[b]; });
  std::vector<double> coeffs, times;
  for (std::size_t idx : order) {
    const double tau = branch_times[idx];
    const double c = branch_coeffs[idx];
    if (!times.empty() && std::abs(tau - times.back()) <= 1e-6 * times.back()) {
      coeffs.back() += c;  // merge coincident taus
    } else {
      times.push_back(tau);
      coeffs.push_back(c);
    }
  }
  branch_coeffs = std::move(coeffs);
  branch_times = std::move(times);
  validate();
}

double PronySeries::instantaneous() const {
  if (mode == PronyMode::Relaxation) {
    double v = base;
    for (double c : branch_coeffs) v += c;
    return v;
  }
  return base;
}

double PronySeries::equilibrium() const {
  if (mode == PronyMode::Relaxation) return base;
  double v = base;
  for (double c : branch_coeffs) v += c;
  return v;
}

PronySeries PronySeries::scaled(double factor) const {
  PronySeries out = *this;
  out.base *= factor;
  for (double& c : out.branch_coeffs) c *= factor;
  return out;
}

double eval_relaxation_modulus(const PronySeries& p, double t_s) {
  if (p.mode != PronyMode::Relaxation) throw ModeError("eval_relaxation_modulus: wrong mode");
  if (t_s < 0.0) throw DomainError("eval_relaxation_modulus: negative time");
  double v = p.base;
  for (std::size_t j = 0; j < p.branch_count(); ++j)
    v += p.branch_coeffs[j] * std::exp(-t_s / p.branch_times[j]);
  return v;
}

double eval_creep_compliance(const PronySeries& p, double t_s) {
  if (p.mode != PronyMode::Creep) throw ModeError("eval_creep_compliance: wrong mode");
  if (t_s < 0.0) throw DomainError("eval_creep_compliance: negative time");
  double v = p.base;
  for (std::size_t j = 0; j < p.branch_count(); ++j)
    v += p.branch_coeffs[j] * (1.0 - std::exp(-t_s / p.branch_times[j]));
  return v;
}

PronySeries default_relaxation_series() {
  PronySeries p;
  p.mode = PronyMode::Relaxation;
  p.base = 1.03;
  p.branch_coeffs = {0.15, 0.13, 0.11};
  p.branch_times = {1.0, 12.1, 109.5};
  return p;
}

PronySeries default_creep_series() {
  PronySeries p;
  p.mode = PronyMode::Creep;
  p.base = 0.97;
  p.branch_coeffs = {0.10, 0.11, 0.15};
  p.branch_times = {3.1, 22.8, 206.2};
  return p;
}

double step_visco_tangent(const PronySeries& p, double dt_s) {
  if (dt_s <= 0.0) throw DomainError("step_visco: dt must be > 0");
  double k = p.base;
  for (std::size_t j = 0; j < p.branch_count(); ++j) {
    const double tau = p.branch_times[j];
    k += p.branch_coeffs[j] * (tau / dt_s) * (1.0 - std::exp(-dt_s / tau));
  }
  return k;
}

double step_visco_offset(const PronySeries& p, const ViscoState& state, double dt_s) {
  if (dt_s <= 0.0) throw DomainError("step_visco: dt must be > 0");
  double off = 0.0;
  for (std::size_t j = 0; j < p.branch_count(); ++j) {
    const double tau = p.branch_times[j];
    const double e = std::exp(-dt_s / tau);
    off += state.branch_states[j] * e;
    off -= p.branch_coeffs[j] * (tau / dt_s) * (1.0 - e) * state.last_strain;
  }
  return off;
}

void step_visco_commit(const PronySeries& p, ViscoState& state, double strain, double dt_s) {
  if (dt_s <= 0.0) throw DomainError("step_visco: dt must be > 0");
  const double d_strain = strain - state.last_strain;
  for (std::size_t j = 0; j < p.branch_count(); ++j) {
    const double tau = p.branch_times[j];
    const double e = std::exp(-dt_s / tau);
    state.branch_states[j] =
        state.branch_states[j] * e + p.branch_coeffs[j] * (tau / dt_s) * (1.0 - e) * d_strain;
  }
  state.last_strain = strain;
  state.time += dt_s;
}

double step_visco(const PronySeries& p, ViscoState& state, double strain, double dt_s) {
  if (p.mode != PronyMode::Relaxation) throw ModeError("step_visco: relaxation mode required");
  step_visco_commit(p, state, strain, dt_s);
  double stress = p.base * strain;
  for (double h : state.branch_states) stress += h;
  return stress;
}

void CurveSamples::validate() const {
  if (times.size() != values.size()) throw DomainError("CurveSamples: length mismatch");
  double prev = -1.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || times[i] <= prev)
      throw DomainError("CurveSamples: times must be nonnegative and strictly increasing");
    if (!(values[i] > 0.0)) throw DomainError("CurveSamples: values must be positive");
    prev = times[i];
  }
}

FitResult fit_prony(const CurveSamples& samples, int n_branches) {
  samples.validate();
  if (n_branches < 1) throw FitError("fit_prony: n_branches must be >= 1");
  const int m = static_cast<int>(samples.times.size());
  const int n_params = 1 + 2 * n_branches;
  if (m < n_params) throw FitError("fit_prony: underdetermined (fewer samples than parameters)");
  const double t_lo = std::max(samples.times.front(), 1e-6);
  const double t_hi = samples.times.back();
  const bool two_decades = t_hi / std::max(t_lo, 1e-12) >= 100.0;
  if (!two_decades && m < 50)
    throw FitError("fit_prony: samples must span >= 2 decades or contain >= 50 points");

  const bool relax = samples.mode == PronyMode::Relaxation;
  const double v0 = samples.values.front();
  const double v_end = samples.values.back();
  const double base_seed = relax ? v_end : v0;
  const double swing = std::max(std::abs(v0 - v_end), 1e-8);

  // Parameters: [softplus^-1(base), softplus^-1(coeff_j)..., log(tau_j)...]
  VecX x0(n_params);
  x0[0] = softplus_inv(std::max(base_seed, 1e-8));
  for (int j = 0; j < n_branches; ++j) {
    x0[1 + j] = softplus_inv(swing / n_branches);
    const double f = n_branches == 1 ? 0.5 : static_cast<double>(j) / (n_branches - 1);
    x0[1 + n_branches + j] = std::log(t_lo) + f * (std::log(t_hi) - std::log(t_lo));
  }

  ResidualFn fn = [&](const VecX& x, VecX& r, MatX* jac) {
    const double base = softplus(x[0]);
    std::vector<double> coeff(n_branches), tau(n_branches);
    for (int j = 0; j < n_branches; ++j) {
      coeff[j] = softplus(x[1 + j]);
      tau[j] = std::exp(x[1 + n_branches + j]);
    }
    for (int i = 0; i < m; ++i) {
      const double t = samples.times[i];
      double v = base;
      for (int j = 0; j < n_branches; ++j) {
        const double e = std::exp(-t / tau[j]);
        v += relax ? coeff[j] * e : coeff[j] * (1.0 - e);
      }
      r[i] = v - samples.values[i];
      if (jac) {
        (*jac)(i, 0) = sigmoid(x[0]);
        for (int j = 0; j < n_branches; ++j) {
          const double e = std::exp(-t / tau[j]);
          (*jac)(i, 1 + j) = (relax ? e : 1.0 - e) * sigmoid(x[1 + j]);
          const double dtau = coeff[j] * e * t / tau[j];  // d/d(log tau)
          (*jac)(i, 1 + n_branches + j) = relax ? dtau : -dtau;
        }
      }
    }
  };

  LMOptions opts;
  opts.max_iterations = 200;
  opts.relative_tolerance = 1e-8;
  const LMResult lm = levenberg_marquardt(fn, x0, m, opts);

  FitResult out;
  out.series.mode = samples.mode;
  out.series.base = softplus(lm.x[0]);
  out.series.branch_coeffs.resize(n_branches);
  out.series.branch_times.resize(n_branches);
  for (int j = 0; j < n_branches; ++j) {
    out.series.branch_coeffs[j] = softplus(lm.x[1 + j]);
    out.series.branch_times[j] = std::exp(lm.x[1 + n_branches + j]);
  }
  out.series.canonicalize();
  out.residual_rms = lm.residual_norm / std::sqrt(static_cast<double>(m));
  out.iterations = lm.iterations;
  out.converged = lm.converged;
  return out;
}

std::string to_string(PronyMode m) {
  return m == PronyMode::Relaxation ? "relaxation" : "creep";
}

PronyMode prony_mode_from_string(const std::string& s) {
  if (s == "relaxation") return PronyMode::Relaxation;
  if (s == "creep") return PronyMode::Creep;
  throw ConfigError("unknown prony mode: " + s);
}

}  // namespace softnet
