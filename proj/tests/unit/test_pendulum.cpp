#include <cmath>
#include <sstream>

#include "doctest.h"
#include "tfc/errors.hpp"
#include "tfc/pendulum.hpp"

using namespace tfc;

namespace {

const PhysicalParams P;

// scipy solve_ivp (DOP853-class, rtol 1e-12) reference values
constexpr double kRevolutionTime = 1.339297905223367;
constexpr double kTheta1 = -2.43194500e-04;  // (0, 1) after 1 s
constexpr double kThetaDot1 = -0.999999704;

Trajectory coast(const State& s0, double t_max, double dt, const StopCondition& stop = {}) {
  return simulate(s0, open_loop([](double, const State&) { return 0.0; }), t_max, dt, stop, P);
}

StopCondition reach_angle(double target) {
  return [target](const Sample& a, const Sample& b) -> std::optional<double> {
    if (a.state.theta < target && b.state.theta >= target) {
      return (target - a.state.theta) / (b.state.theta - a.state.theta);
    }
    return std::nullopt;
  };
}

}  // namespace

TEST_CASE("derivative at reference states") {
  auto d = derivative({kPi, 0.0}, 0.0, P);
  CHECK(d.d_theta == 0.0);
  CHECK(d.d_theta_dot == doctest::Approx(0.0).epsilon(1e-12));
  d = derivative({0.0, 0.0}, 3.0, P);
  CHECK(d.d_theta_dot == 3.0);
  d = derivative({kPi / 2, 1.0}, 0.0, P);
  CHECK(d.d_theta == 1.0);
  CHECK(d.d_theta_dot == doctest::Approx(-10.0));
}

TEST_CASE("energy levels") {
  CHECK(total_energy({kPi, 0.0}, P) == doctest::Approx(10.0));
  CHECK(total_energy({0.0, 0.0}, P) == doctest::Approx(-10.0));
  CHECK(total_energy({0.0, std::sqrt(40.0)}, P) == doctest::Approx(10.0));
  CHECK(target_energy(P) == 10.0);
}

TEST_CASE("wrapping and mirror") {
  CHECK(wrap_to_pi(3 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_to_pi(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_to_two_pi(-0.5) == doctest::Approx(kTwoPi - 0.5));
  const State m = mirror({1.0, 2.0});
  CHECK(m.theta == doctest::Approx(kTwoPi - 1.0));
  CHECK(m.theta_dot == -2.0);
}

TEST_CASE("rk4 keeps the equilibrium") {
  const State s = step_rk4({kPi, 0.0}, 0.0, 1e-3, P);
  CHECK(s.theta == kPi);
  CHECK(std::abs(s.theta_dot) < 1e-15);
  const auto traj = coast({kPi, 0.0}, 1.0, 1e-3);
  CHECK(traj.back().t == doctest::Approx(1.0));
  CHECK(std::abs(traj.back().state.theta_dot) < 1e-12);
}

TEST_CASE("one revolution conserves energy and lands on the far edge") {
  const State s0{kPi + 0.3, 2.0};
  const auto traj = coast(s0, 5.0, 1e-3, reach_angle(3 * kPi - 0.3));
  REQUIRE(traj.event);
  CHECK(traj.event->state.theta == doctest::Approx(3 * kPi - 0.3));
  CHECK(traj.event->t == doctest::Approx(kRevolutionTime).epsilon(1e-6));
  CHECK(traj.event->state.theta_dot == doctest::Approx(2.0).epsilon(1e-6));
  const double e0 = total_energy(s0, P);
  double worst = 0.0;
  for (const auto& s : traj.samples) worst = std::max(worst, std::abs(total_energy(s.state, P) - e0));
  CHECK(worst < 1e-8);
}

TEST_CASE("rk4 global error is fourth order") {
  auto err = [](double dt) {
    const auto traj = coast({0.0, 1.0}, 1.0, dt);
    const State& s = traj.back().state;
    return std::hypot(s.theta - kTheta1, s.theta_dot - kThetaDot1);
  };
  const double ratio = err(0.02) / err(0.01);
  CHECK(ratio == doctest::Approx(16.0).epsilon(0.1));
}

TEST_CASE("slow exit stalls before the far edge") {
  const auto traj = coast({kPi + 0.3, 0.5}, 5.0, 1e-3, reach_angle(3 * kPi - 0.3));
  CHECK(total_energy(traj.samples.front().state, P) == doctest::Approx(9.6784).epsilon(1e-4));
  // above the window energy, so the far edge is still reached
  CHECK(traj.event.has_value());
  // 0.125 + 10 cos 0.5 = 8.90 J, below 10 cos 0.3
  const auto slow = coast({kPi + 0.5, 0.5}, 3.0, 1e-3, reach_angle(3 * kPi - 0.3));
  CHECK_FALSE(slow.event.has_value());
}

TEST_CASE("torque is clamped to the actuator limit") {
  const auto traj = simulate({0.0, 0.0}, open_loop([](double, const State&) { return 50.0; }), 0.01, 1e-3, {}, P);
  CHECK(traj.samples.front().u == 3.0);
  CHECK(traj.samples.front().mode == ControlMode::FeedforwardOn);
}

TEST_CASE("non-finite states are reported") {
  const ControlLaw law = [](double, const State&) { return Command{std::nan(""), ControlMode::Coast}; };
  CHECK_THROWS_AS(simulate({0.0, 0.0}, law, 0.01, 1e-3, {}, P), NonFinite);
}

TEST_CASE("trajectory csv") {
  std::ostringstream out;
  write_trajectory_csv(out, coast({kPi, 0.0}, 0.002, 1e-3), P);
  CHECK(out.str().rfind("t,theta,theta_dot,u,mode,energy\n", 0) == 0);
}
