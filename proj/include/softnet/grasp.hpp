#pragma once

#include <string>
#include <vector>

#include "softnet/common.hpp"
#include "softnet/prony.hpp"

namespace softnet {

// Two-finger lift scenario: point-mass object held by symmetric
// viscoelastic finger pads, fingers mounted at angle beta.
struct GraspScenario {
  double gravity_n = 3.0;  // object weight G
  double mu_true = 0.3;
  double beta_deg = 0.0;
  double close_speed_mm_per_s = 4.0;  // pad compression rate while closing
  double grip_target_n = 15.0;        // stop closing once F_g reaches this
  double max_force_n = 18.0;
  double hold_s = 30.0;  // observation window after grip stop
  double rate_hz = 330.0;
  double pad_n_per_mm = 1.0;  // pad force per unit E_rel per mm compression

  void validate() const;
};

enum class GraspPhase { PreContact, Sliding, Lifted, Gripped, Slipping };

struct GraspState {
  double t_s = 0.0;
  Vec6 w1 = Vec6::Zero();  // finger wrenches in their own frames
  Vec6 w2 = Vec6::Zero();
  double fg_n = 0.0;
  double fs_n = 0.0;
  double mu_hat = 0.0;
  double fg_prime_n = 0.0;  // relaxation-compensated prediction
  GraspPhase phase = GraspPhase::PreContact;
};

struct GraspTimeline {
  std::vector<GraspState> states;
  double t1_s = -1.0;  // contact
  double t2_s = -1.0;  // liftoff
  double t3_s = -1.0;  // grip stop
  bool lifted = false;
  bool slipped = false;
  std::string outcome;  // "held" | "slipped" | "never lifted"
};

// F_g = (F1_x + F2_x) cos(beta).
double gripping_force(const Vec6& w1, const Vec6& w2, double beta_deg);

// F_s = F1_y - F2_y.
double shear_force(const Vec6& w1, const Vec6& w2);

// Mean F_s/F_g over the sliding-phase samples. Throws EstimationError
// when the timeline has no sliding window.
double estimate_friction(const std::vector<GraspState>& timeline);

// F_g'(t) = F_g(t3) * E_rel(t - t3) / E_rel(0). dt < 0 -> DomainError;
// non-relaxation series -> ModeError.
double compensate_relaxation(double fg_t3_n, const PronySeries& relax, double dt_since_t3_s);

// First t - t3 at which fs/F_g'(t) exceeds mu (closed-form root via
// bisection); +inf when the equilibrium force still holds the cone.
double predicted_slip_time(double fg_t3_n, double fs_n, double mu, const PronySeries& relax);

struct ConeControllerConfig {
  double mu_safe = 0.3;
  double margin = 0.8;  // keep F_s/F_g <= mu_safe * margin
  double deadband_frac = 0.02;
  double gain = 0.5;         // fraction of the force error applied per tick
  double max_force_n = 18.0;
  double rate_hz = 330.0;
};

struct ControllerDecision {
  double fg_command_n = 0.0;
  bool alarm = false;  // estimates unavailable, holding last command
};

// Proportional width controller on the friction-cone margin: raises the
// grip-force command so that F_s/F_g stays below mu_safe*margin, with a
// relative deadband and the configured force ceiling.
class FrictionConeController {
 public:
  explicit FrictionConeController(const ConeControllerConfig& cfg) : cfg_(cfg) {}

  ControllerDecision step(double fg_meas_n, double fs_meas_n, bool estimates_ok = true);
  const ConeControllerConfig& config() const { return cfg_; }

 private:
  ConeControllerConfig cfg_;
  double last_cmd_n_ = 0.0;
};

// Runs the scenario against a single viscoelastic pad element stepped at
// rate_hz. Without the controller the grip width is frozen at t3 and the
// force relaxes per the series; with it the width is servoed to stay in
// the cone.
GraspTimeline simulate_lift(const GraspScenario& sc, const PronySeries& relax,
                            bool with_controller);

}  // namespace softnet
