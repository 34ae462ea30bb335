#pragma once

#include <string>
#include <vector>

#include "softnet/common.hpp"

namespace softnet {

enum class PronyMode { Relaxation, Creep };

// Sum-of-exponentials viscoelastic model.
//
// Relaxation (Wiechert):  E_rel(t) = base + sum_j coeff_j * exp(-t/tau_j)
// Creep (Kelvin):         C_crp(t) = base + sum_j coeff_j * (1 - exp(-t/tau_j))
//
// Units: base/coeffs in N/mm for Relaxation, mm/N for Creep; taus in s.
struct PronySeries {
  PronyMode mode = PronyMode::Relaxation;
  double base = 1.0;
  std::vector<double> branch_coeffs;
  std::vector<double> branch_times;

  std::size_t branch_count() const { return branch_coeffs.size(); }

  // Validates invariants and sorts branches by ascending tau, merging
  // branches whose taus coincide.
  void canonicalize();
  void validate() const;

  double instantaneous() const;  // t = 0 value
  double equilibrium() const;    // t -> inf value

  // Scales base and all branch coefficients; taus are untouched.
  PronySeries scaled(double factor) const;
};

double eval_relaxation_modulus(const PronySeries& p, double t_s);
double eval_creep_compliance(const PronySeries& p, double t_s);

// The two fitted parameter sets used throughout as defaults.
PronySeries default_relaxation_series();  // k_e=1.03, k=[.15,.13,.11], tau=[1.0,12.1,109.5]
PronySeries default_creep_series();       // m_g=0.97, m=[.10,.11,.15], tau=[3.1,22.8,206.2]

// Internal-variable state for time stepping a Relaxation series.
struct ViscoState {
  std::vector<double> branch_states;  // per-Maxwell-branch stress, N/mm-strain
  double last_strain = 0.0;
  double time = 0.0;

  static ViscoState rest(const PronySeries& p) {
    ViscoState s;
    s.branch_states.assign(p.branch_count(), 0.0);
    return s;
  }
};

// Advances the state by dt assuming the strain varied linearly from
// state.last_strain to `strain` over the step (exact exponential
// recurrence for piecewise-linear strain). Returns total stress
// base*strain + sum(branch_states).
double step_visco(const PronySeries& p, ViscoState& state, double strain, double dt_s);

// Tangent stiffness of step_visco with respect to the end-of-step strain
// (constant within a step); used by the equilibrium solver.
double step_visco_tangent(const PronySeries& p, double dt_s);

// Stress at end of step as an affine function of end strain:
// stress = step_visco_tangent(p,dt)*strain + step_visco_offset(p,state,dt).
double step_visco_offset(const PronySeries& p, const ViscoState& state, double dt_s);

// Commits a step at the given end strain (same recurrence as step_visco).
void step_visco_commit(const PronySeries& p, ViscoState& state, double strain, double dt_s);

struct CurveSamples {
  std::vector<double> times;   // s, strictly increasing
  std::vector<double> values;  // N/mm or mm/N, positive
  PronyMode mode = PronyMode::Relaxation;

  void validate() const;
};

struct FitResult {
  PronySeries series;
  double residual_rms = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Least-squares Prony fit: damped Gauss-Newton on log(tau) and
// softplus-parameterized coefficients; tau seeds log-spaced over the
// sample span. Throws FitError when samples are insufficient; on
// iteration-cap non-convergence returns best-so-far with converged=false.
FitResult fit_prony(const CurveSamples& samples, int n_branches);

std::string to_string(PronyMode m);
PronyMode prony_mode_from_string(const std::string& s);

}  // namespace softnet
