#include "softnet/grasp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace softnet {

void GraspScenario::validate() const {
  if (gravity_n < 0.0) throw ConfigError("grasp: gravity must be >= 0");
  if (mu_true < 0.0) throw ConfigError("grasp: friction coefficient must be >= 0");
  if (close_speed_mm_per_s <= 0.0 || rate_hz <= 0.0 || pad_n_per_mm <= 0.0)
    throw ConfigError("grasp: speeds, rate and pad stiffness must be positive");
  if (grip_target_n <= 0.0 || max_force_n < grip_target_n)
    throw ConfigError("grasp: need 0 < grip_target <= max_force");
}

double gripping_force(const Vec6& w1, const Vec6& w2, double beta_deg) {
  return (w1[0] + w2[0]) * std::cos(beta_deg * M_PI / 180.0);
}

double shear_force(const Vec6& w1, const Vec6& w2) { return w1[1] - w2[1]; }

double estimate_friction(const std::vector<GraspState>& timeline) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : timeline) {
    if (s.phase != GraspPhase::Sliding || s.fg_n < 1e-9) continue;
    sum += s.fs_n / s.fg_n;
    ++n;
  }
  if (n == 0) throw EstimationError("estimate_friction: timeline has no sliding window");
  return sum / static_cast<double>(n);
}

double compensate_relaxation(double fg_t3_n, const PronySeries& relax, double dt_since_t3_s) {
  if (dt_since_t3_s < 0.0) throw DomainError("compensate_relaxation: t must be >= t3");
  return fg_t3_n * eval_relaxation_modulus(relax, dt_since_t3_s) / relax.instantaneous();
}

double predicted_slip_time(double fg_t3_n, double fs_n, double mu, const PronySeries& relax) {
  if (mu <= 0.0) throw DomainError("predicted_slip_time: mu must be positive");
  const double needed = fs_n / mu;  // grip force below this slips
  if (fg_t3_n <= needed) return 0.0;
  if (compensate_relaxation(fg_t3_n, relax, 1e9) >= needed)
    return std::numeric_limits<double>::infinity();
  double lo = 0.0, hi = 1.0;
  while (compensate_relaxation(fg_t3_n, relax, hi) > needed) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (compensate_relaxation(fg_t3_n, relax, mid) > needed ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ControllerDecision FrictionConeController::step(double fg_meas_n, double fs_meas_n,
                                                bool estimates_ok) {
  ControllerDecision d;
  if (!estimates_ok) {
    d.fg_command_n = last_cmd_n_;
    d.alarm = true;
    return d;
  }
  // Force needed to keep F_s/F_g at the shrunk cone boundary.
  const double target = fs_meas_n / (cfg_.mu_safe * cfg_.margin);
  double cmd = last_cmd_n_;
  if (cmd < 1e-9) cmd = fg_meas_n;
  const double err = target - cmd;
  if (std::abs(err) > cfg_.deadband_frac * std::max(target, 1e-9)) cmd += cfg_.gain * err;
  cmd = std::clamp(cmd, 0.0, cfg_.max_force_n);
  last_cmd_n_ = cmd;
  d.fg_command_n = cmd;
  return d;
}

GraspTimeline simulate_lift(const GraspScenario& sc, const PronySeries& relax,
                            bool with_controller) {
  sc.validate();
  relax.validate();
  if (relax.mode != PronyMode::Relaxation)
    throw ModeError("simulate_lift: pad model must be a relaxation series");

  const double dt = 1.0 / sc.rate_hz;
  const double cos_b = std::cos(sc.beta_deg * M_PI / 180.0);
  const double t1 = 0.2;  // scripted approach time before contact
  const double tangent = step_visco_tangent(relax, dt) * sc.pad_n_per_mm;

  ConeControllerConfig ccfg;
  ccfg.mu_safe = sc.mu_true;
  ccfg.max_force_n = sc.max_force_n;
  ccfg.rate_hz = sc.rate_hz;
  FrictionConeController controller(ccfg);

  GraspTimeline tl;
  ViscoState pad = ViscoState::rest(relax);
  double u = 0.0;       // pad compression, mm
  double mu_hat = 0.0;  // running sliding-phase mean
  std::size_t mu_n = 0;
  GraspPhase phase = GraspPhase::PreContact;
  double fg_t3 = 0.0;

  const double t_end = t1 + sc.grip_target_n / (sc.pad_n_per_mm * sc.close_speed_mm_per_s) +
                       sc.hold_s;
  const int steps = static_cast<int>(std::ceil(t_end / dt));

  for (int i = 0; i <= steps; ++i) {
    const double t = i * dt;
    GraspState s;
    s.t_s = t;

    if (t >= t1 && tl.t1_s < 0.0) tl.t1_s = t;
    if (t >= t1) {
      if (tl.t3_s < 0.0) {
        u += sc.close_speed_mm_per_s * dt;  // closing ramp
      } else if (with_controller) {
        const double fg_now = sc.pad_n_per_mm *
                              (step_visco_tangent(relax, dt) * u + step_visco_offset(relax, pad, dt));
        const double fs_now = tl.lifted ? sc.gravity_n : sc.mu_true * fg_now;
        const double cmd = controller.step(fg_now, fs_now).fg_command_n;
        u += std::clamp((cmd - fg_now) / tangent, -sc.close_speed_mm_per_s * dt,
                        sc.close_speed_mm_per_s * dt);
      }
    }

    const double fg = sc.pad_n_per_mm * step_visco(relax, pad, u, dt);
    double fs;
    if (!tl.lifted) {
      fs = sc.mu_true * fg;  // fingers sliding along the grounded object
      if (phase != GraspPhase::PreContact || fg > 1e-9)
        phase = (fg > 1e-9) ? GraspPhase::Sliding : GraspPhase::PreContact;
      if (fg > 1e-9 && fs >= sc.gravity_n) {
        tl.lifted = true;
        tl.t2_s = t;
        phase = GraspPhase::Lifted;
        fs = sc.gravity_n;
      }
    } else {
      fs = sc.gravity_n;
      if (sc.mu_true * fg < sc.gravity_n) {
        phase = GraspPhase::Slipping;
        tl.slipped = true;
        fs = sc.mu_true * fg;
      } else if (tl.t3_s >= 0.0) {
        phase = GraspPhase::Gripped;
      }
    }

    if (tl.t3_s < 0.0 && fg >= sc.grip_target_n) {
      tl.t3_s = t;
      fg_t3 = fg;
      phase = GraspPhase::Gripped;
    }

    if (phase == GraspPhase::Sliding && fg > 1e-9) {
      mu_hat = (mu_hat * mu_n + fs / fg) / static_cast<double>(mu_n + 1);
      ++mu_n;
    }

    s.fg_n = fg;
    s.fs_n = fs;
    s.mu_hat = mu_hat;
    s.fg_prime_n = (tl.t3_s >= 0.0 && t >= tl.t3_s)
                       ? compensate_relaxation(fg_t3, relax, t - tl.t3_s)
                       : fg;
    s.phase = phase;
    // Symmetric finger wrenches consistent with the composition formulas.
    s.w1[0] = s.w2[0] = cos_b > 1e-9 ? fg / (2.0 * cos_b) : 0.0;
    s.w1[1] = fs / 2.0;
    s.w2[1] = -fs / 2.0;
    tl.states.push_back(s);

    if (tl.slipped && !with_controller) break;  // object dropped
  }

  if (!tl.lifted)
    tl.outcome = "never lifted";
  else if (tl.slipped)
    tl.outcome = "slipped";
  else
    tl.outcome = "held";
  return tl;
}

}  // namespace softnet
