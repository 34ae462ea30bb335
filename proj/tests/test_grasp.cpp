#include <cmath>

#include "doctest.h"
#include "softnet/contour.hpp"
#include "softnet/grasp.hpp"
#include "softnet/rng.hpp"

using namespace softnet;

namespace {

Vec6 wrench_xy(double fx, double fy) {
  Vec6 w = Vec6::Zero();
  w[0] = fx;
  w[1] = fy;
  return w;
}

}  // namespace

TEST_CASE("gripping force formula") {
  CHECK(gripping_force(wrench_xy(5, 0), wrench_xy(5, 0), 0.0) == doctest::Approx(10.0));
  CHECK(gripping_force(wrench_xy(5, 0), wrench_xy(5, 0), 60.0) == doctest::Approx(5.0));
  CHECK(gripping_force(wrench_xy(0, 3), wrench_xy(0, -3), 0.0) == doctest::Approx(0.0));
  // Randomized algebraic oracle.
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const double f1 = rng.uniform(-10, 10), f2 = rng.uniform(-10, 10);
    const double beta = rng.uniform(0, 80);
    CHECK(gripping_force(wrench_xy(f1, 0), wrench_xy(f2, 0), beta) ==
          doctest::Approx((f1 + f2) * std::cos(beta * M_PI / 180.0)).epsilon(1e-12));
  }
}

TEST_CASE("shear force formula") {
  CHECK(shear_force(wrench_xy(0, 2), wrench_xy(0, -2)) == doctest::Approx(4.0));
  CHECK(shear_force(wrench_xy(0, 1.5), wrench_xy(0, 1.5)) == doctest::Approx(0.0));
}

TEST_CASE("relaxation compensation follows the closed form") {
  const PronySeries relax = default_relaxation_series();
  CHECK(compensate_relaxation(12.0, relax, 0.0) == doctest::Approx(12.0).epsilon(1e-12));
  // t -> inf: k_e / (k_e + sum k_j) = 1.03 / 1.42.
  CHECK(compensate_relaxation(12.0, relax, 1e9) ==
        doctest::Approx(12.0 * 1.03 / 1.42).epsilon(1e-9));
  // Monotone nonincreasing.
  double prev = compensate_relaxation(10.0, relax, 0.0);
  for (double t = 0.5; t < 100.0; t += 0.5) {
    const double cur = compensate_relaxation(10.0, relax, t);
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
  CHECK_THROWS_AS(compensate_relaxation(10.0, relax, -0.1), DomainError);
  CHECK_THROWS_AS(compensate_relaxation(10.0, default_creep_series(), 1.0), ModeError);
}

TEST_CASE("predicted slip time matches an independent bisection on the ratio") {
  const PronySeries relax = default_relaxation_series();
  const double fg3 = 10.0, fs = 2.5, mu = 0.3;
  const double t = predicted_slip_time(fg3, fs, mu, relax);
  REQUIRE(std::isfinite(t));
  // Oracle: scan for the first crossing of fs / Fg'(t) = mu.
  double lo = 0.0, hi = 1000.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double ratio = fs / compensate_relaxation(fg3, relax, mid);
    (ratio > mu ? hi : lo) = mid;
  }
  CHECK(t == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-6));
  // Equilibrium force still inside the cone -> never slips.
  CHECK(std::isinf(predicted_slip_time(10.0, 1.0, 0.3, relax)));
}

TEST_CASE("simulate_lift: phases ordered, friction estimate near truth") {
  GraspScenario sc;  // mu*=0.3, G=3 N
  const GraspTimeline tl = simulate_lift(sc, default_relaxation_series(), false);
  CHECK(tl.lifted);
  CHECK(tl.t1_s >= 0.0);
  CHECK(tl.t1_s < tl.t2_s);
  CHECK(tl.t2_s <= tl.t3_s);
  const double mu_hat = estimate_friction(tl.states);
  CHECK(mu_hat >= 0.27);
  CHECK(mu_hat <= 0.33);
  // Lifted equilibrium: shear supports the object's weight.
  double fs_lifted = 0.0;
  for (const auto& s : tl.states)
    if (s.phase == GraspPhase::Gripped) fs_lifted = s.fs_n;
  CHECK(fs_lifted == doctest::Approx(sc.gravity_n).epsilon(0.02));
}

TEST_CASE("simulate_lift corner cases") {
  GraspScenario sc;
  sc.gravity_n = 0.0;
  const GraspTimeline weightless = simulate_lift(sc, default_relaxation_series(), false);
  CHECK(weightless.lifted);
  CHECK(weightless.t2_s == doctest::Approx(weightless.t1_s).epsilon(0.05));

  GraspScenario infeasible;
  infeasible.mu_true = 0.05;
  infeasible.gravity_n = 10.0;
  infeasible.grip_target_n = 15.0;
  const GraspTimeline stuck = simulate_lift(infeasible, default_relaxation_series(), false);
  CHECK_FALSE(stuck.lifted);
  CHECK(stuck.outcome == "never lifted");

  GraspScenario frictionless;
  frictionless.mu_true = 1e-6;
  frictionless.gravity_n = 3.0;
  const GraspTimeline slick = simulate_lift(frictionless, default_relaxation_series(), false);
  CHECK(estimate_friction(slick.states) == doctest::Approx(0.0).epsilon(1e-3));
}

TEST_CASE("estimate_friction needs a sliding window") {
  CHECK_THROWS_AS(estimate_friction({}), EstimationError);
}

TEST_CASE("friction cone controller: cap respected, settles without limit cycle") {
  ConeControllerConfig cfg;
  FrictionConeController ctl(cfg);
  double cmd_prev = 0.0;
  int flips = 0;
  for (int i = 0; i < 2000; ++i) {
    // Constant shear demands fg >= fs / (mu_safe*margin) = 5 / 0.24.
    const double fg_meas = std::max(cmd_prev, 1.0);
    const ControllerDecision d = ctl.step(fg_meas, 5.0);
    CHECK(d.fg_command_n <= cfg.max_force_n + 1e-12);
    if (i > 1500 && std::abs(d.fg_command_n - cmd_prev) >
                        cfg.deadband_frac * std::max(1.0, cmd_prev))
      ++flips;
    cmd_prev = d.fg_command_n;
  }
  CHECK(flips <= 1);  // settled
  // Estimates unavailable: hold last command with alarm.
  const ControllerDecision hold = ctl.step(0.0, 0.0, false);
  CHECK(hold.alarm);
  CHECK(hold.fg_command_n == doctest::Approx(cmd_prev).epsilon(1e-12));
}

TEST_CASE("controlled grasp keeps the ratio inside the cone") {
  GraspScenario sc;
  sc.hold_s = 20.0;
  const GraspTimeline tl = simulate_lift(sc, default_relaxation_series(), true);
  REQUIRE(tl.lifted);
  int in_cone = 0, total = 0;
  for (const auto& s : tl.states) {
    if (s.t_s <= tl.t3_s || s.fg_n <= 0.0) continue;
    ++total;
    if (s.fs_n / s.fg_n <= 0.3 + 1e-9) ++in_cone;
    CHECK(s.fg_n <= sc.max_force_n + 1e-9);
  }
  REQUIRE(total > 0);
  CHECK(static_cast<double>(in_cone) / total >= 0.99);
}

TEST_CASE("hausdorff distance oracle") {
  const std::vector<Vec2> a = {{0, 0}, {10, 0}};
  const std::vector<Vec2> b = {{0, 1}, {10, 1}};
  CHECK(hausdorff_distance(a, b) == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<Vec2> c = {{0, 0}, {5, 3}, {10, 0}};
  CHECK(hausdorff_distance(a, c) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("contour following: straight wall reconstructs a straight segment") {
  const ContourWorld world = make_wall_world(60.0);
  const ContourResult res = contour_follow(world);
  CHECK(res.completed);
  CHECK(res.in_band_fraction >= 0.95);
  // Every reconstructed point lies within 2 mm of the wall line.
  CHECK(hausdorff_distance(res.trajectory, world.contour) <= 2.0);
}

TEST_CASE("contour following: 50 mm arc within 2 mm Hausdorff") {
  const ContourWorld world = make_arc_world(50.0, -60.0, 60.0);
  const ContourResult res = contour_follow(world);
  CHECK(res.completed);
  CHECK(res.in_band_fraction >= 0.95);
  CHECK(hausdorff_distance(res.trajectory, world.contour) <= 2.0);
}

TEST_CASE("scenario and world validation") {
  GraspScenario sc;
  sc.mu_true = -0.1;
  CHECK_THROWS_AS(sc.validate(), ConfigError);
  ContourWorld w = make_wall_world(10.0);
  w.force_hi_n = w.force_lo_n;
  CHECK_THROWS_AS(w.validate(), ConfigError);
}
