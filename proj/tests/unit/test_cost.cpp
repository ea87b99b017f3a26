#include <cmath>

#include "doctest.h"
#include "tfc/cost.hpp"

using namespace tfc;

namespace {
const PhysicalParams P;
const CostParams C;
const RegionConfig R;

// Coast from (pi + 0.3, 2) to the far edge: E = 11.5533649 J for
// 1.3392979 s (scipy solve_ivp, rtol 1e-12), so (E - 10)^2 T.
constexpr double kCoastQuadrature = 3.2316488161;

Trajectory constant(const State& s, double u, double horizon, double dt) {
  Trajectory t;
  t.dt = dt;
  const auto n = static_cast<long>(std::lround(horizon / dt));
  for (long k = 0; k <= n; ++k) t.samples.push_back({k * dt, s, u, ControlMode::Coast});
  return t;
}
}  // namespace

TEST_CASE("stage cost") {
  CHECK(stage_cost({0.0, std::sqrt(40.0)}, 0.0, C, P) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(stage_cost({kPi, 0.0}, 3.0, C, P) == doctest::Approx(900.0));
  CHECK(stage_cost({0.0, 0.0}, 0.0, C, P) == doctest::Approx(400.0));
}

TEST_CASE("trial cost quadrature") {
  CHECK(trial_cost(constant({kPi, 0.0}, 0.0, 3.0, 1e-3), C, P) == doctest::Approx(0.0).epsilon(1e-12));
  // E = 11 at (pi, sqrt 2)
  CHECK(trial_cost(constant({kPi, std::sqrt(2.0)}, 0.0, 2.0, 1e-3), C, P) == doctest::Approx(2.0));
  const auto t = constant({kPi, std::sqrt(2.0)}, 0.0, 2.0, 1e-3);
  CHECK(trial_cost(t, 0, 1000, C, P) == doctest::Approx(1.0));
}

TEST_CASE("coast quadrature matches the fine oracle") {
  const auto traj = trial_trajectory(2.0, {0.0, 0.0, -3.0}, R);
  REQUIRE(traj.event);
  const auto out = evaluate_protocol(2.0, {0.0, 0.0, -3.0}, C, R);
  CHECK(out.quadrature == doctest::Approx(kCoastQuadrature).epsilon(1e-3));
  CHECK(out.t_end == doctest::Approx(1.3392979).epsilon(1e-5));
}

TEST_CASE("trial outcomes") {
  auto out = evaluate_protocol(1.0, {0.3, 0.0, -3.0}, C, R);
  CHECK(out.success);
  CHECK(out.J == out.quadrature);
  REQUIRE(out.reentry_state);
  CHECK(out.reentry_state->theta_dot == doctest::Approx(1.0).epsilon(1e-6));

  out = evaluate_protocol(5.0, {0.0, 0.0, -3.0}, C, R);
  CHECK_FALSE(out.success);
  CHECK(out.J == doctest::Approx(out.quadrature + C.fail_penalty));

  out = evaluate_protocol(0.1, {0.0, 0.6, -3.0}, C, R);
  CHECK(out.stalled);
  CHECK_FALSE(out.success);
}

TEST_CASE("work done by the held torque") {
  const auto coast = trial_trajectory(3.0, {0.0, 0.0, -3.0}, R);
  CHECK(delta_energy(coast, 0.0, coast.back().t) == 0.0);

  const auto traj = trial_trajectory(3.0, {0.2, 0.3, -3.0}, R);
  const double de = total_energy(traj.back().state, P) - total_energy(traj.samples.front().state, P);
  CHECK(delta_energy(traj, 0.0, traj.back().t) == doctest::Approx(de).epsilon(1e-6));
  CHECK(de < 0.0);
}

TEST_CASE("a fixed burst removes the most energy at peak speed") {
  // the bottom of the swing is where |theta_dot| peaks
  const auto coast = trial_trajectory(4.0, {0.0, 0.0, -3.0}, R);
  double t_bottom = 0.0;
  double best_speed = 0.0;
  for (const auto& s : coast.samples) {
    if (std::abs(s.state.theta_dot) > best_speed) {
      best_speed = std::abs(s.state.theta_dot);
      t_bottom = s.t;
    }
  }
  const double tau = 0.1;
  double best_center = 0.0;
  double best_loss = 0.0;
  for (double c = 0.1; c < coast.back().t - 0.1; c += 0.01) {
    const auto traj = trial_trajectory(4.0, {c - tau / 2, tau, -3.0}, R);
    const double loss = -delta_energy(traj, 0.0, traj.back().t);
    if (loss > best_loss) {
      best_loss = loss;
      best_center = c;
    }
  }
  CHECK(best_center == doctest::Approx(t_bottom).epsilon(0.03));
}
