#include <cmath>

#include "doctest.h"
#include "tfc/control.hpp"
#include "tfc/errors.hpp"

using namespace tfc;

namespace {
const PhysicalParams P;
// np.roots([1, 309.9, 990])
constexpr double kSlowPole = -3.2282069;
constexpr double kFastPole = -306.6717931;
}  // namespace

TEST_CASE("feedback torque") {
  const FeedbackGains k;
  CHECK(feedback_torque({kPi, 0.0}, k, P) == 0.0);
  CHECK(feedback_torque({kPi + 0.1, 0.0}, k, P) == -3.0);
  CHECK(feedback_torque({kPi, 0.001}, k, P) == doctest::Approx(-0.3099));
  CHECK(feedback_torque({3 * kPi, 0.001}, k, P) == doctest::Approx(-0.3099));
}

TEST_CASE("protocol torque window") {
  const Protocol u{0.43, 0.17, -3.0};
  CHECK(protocol_torque(0.0, u) == 0.0);
  CHECK(protocol_torque(0.5, u) == -3.0);
  CHECK(protocol_torque(0.61, u) == 0.0);
  CHECK(protocol_torque(0.43, u) == -3.0);
}

TEST_CASE("step torque switches at the midpoint") {
  const Protocol u{0.1, 0.2, -3.0};
  const double dt = 1e-3;
  CHECK(protocol_step_torque(0.0985, dt, u) == 0.0);
  CHECK(protocol_step_torque(0.0996, dt, u) == -3.0);
  CHECK(protocol_step_torque(0.2994, dt, u) == -3.0);
  CHECK(protocol_step_torque(0.2996, dt, u) == 0.0);
  // exactly tau / dt steps are on
  int on = 0;
  for (int k = 0; k < 1000; ++k) on += protocol_step_torque(k * dt, dt, u) != 0.0;
  CHECK(on == 200);
  CHECK(protocol_step_torque(0.0, dt, {0.0, 0.0, -3.0}) == 0.0);
}

TEST_CASE("default gains and closed-loop poles") {
  const FeedbackGains k = default_gains();
  CHECK(k.k1 == 1000.0);
  CHECK(k.k2 == 309.9);
  const auto ev = closed_loop_eigenvalues(k, P);
  const double hi = std::max(ev[0].real(), ev[1].real());
  const double lo = std::min(ev[0].real(), ev[1].real());
  CHECK(hi == doctest::Approx(kSlowPole).epsilon(1e-7));
  CHECK(lo == doctest::Approx(kFastPole).epsilon(1e-7));
  CHECK(ev[0].imag() == 0.0);
}

TEST_CASE("eigenvector-aligned gain") {
  const FeedbackGains k = derive_gains(1000.0, P);
  CHECK(k.k2 == doctest::Approx(316.2277660));
  // (A - BK) v = lambda v for v = (1, -sqrt 10)
  const double r = std::sqrt(10.0);
  const double row2 = 10.0 * 1.0 - k.k1 * 1.0 - k.k2 * (-r);
  const double lambda = -r;
  CHECK(row2 == doctest::Approx(lambda * -r));
  CHECK_THROWS_AS(derive_gains(5.0, P), Unstabilizable);
}

TEST_CASE("nearest-entry selector prefers the higher entry on ties") {
  ProtocolTable t;
  t.entries = {{1.0, {0.0, 0.0, -3.0}, 0.0}, {2.0, {0.4, 0.1, -3.0}, 0.0}};
  const auto sel = selector_for(t);
  CHECK(sel(1.2)->tau == 0.0);
  CHECK(sel(1.5)->tau == 0.1);
  CHECK(sel(9.0)->tau == 0.1);
  CHECK_FALSE(selector_for(ProtocolTable{})(1.0));
  CHECK(t.valid(3.0));
  t.entries[1].theta_dot_0 = 1.0;
  CHECK_FALSE(t.valid(3.0));
}

TEST_CASE("hybrid run settles a small offset") {
  const RegionConfig cfg;
  const auto run = run_hybrid({kPi, 0.001}, [](double) { return std::nullopt; }, 5.0, 1e-3, cfg, default_gains());
  const State& s = run.trajectory.back().state;
  CHECK(std::abs(wrap_to_pi(s.theta - kPi)) + std::abs(s.theta_dot) < 1e-3);
  CHECK(run.triggers.empty());
  for (const auto& smp : run.trajectory.samples) CHECK(smp.mode == ControlMode::Feedback);
}

TEST_CASE("slow exit coasts one revolution under a zero-length protocol") {
  const RegionConfig cfg;
  ProtocolTable t;
  t.entries = {{1.0, {0.0, 0.0, -3.0}, 0.0}};
  const auto run = run_hybrid({kPi + 0.3, 1.0}, selector_for(t), 5.0, 1e-3, cfg, default_gains());
  REQUIRE(run.triggers.size() == 1);
  CHECK(run.triggers[0].direction == Direction::Positive);
  CHECK(run.triggers[0].protocol.tau == 0.0);
  const State& s = run.trajectory.back().state;
  CHECK(run.trajectory.back().mode == ControlMode::Feedback);
  CHECK(std::abs(wrap_to_pi(s.theta - kPi)) + std::abs(s.theta_dot) < 1e-3);
}

TEST_CASE("negative exits mirror the protocol torque") {
  const RegionConfig cfg;
  ProtocolTable t;
  t.entries = {{3.0, {0.3, 0.1, -3.0}, 0.0}};
  const auto run = run_hybrid({kPi - 0.3, -3.0}, selector_for(t), 0.5, 1e-3, cfg, default_gains());
  REQUIRE_FALSE(run.triggers.empty());
  CHECK(run.triggers[0].direction == Direction::Negative);
  CHECK(run.triggers[0].protocol.u_on == 3.0);
}
