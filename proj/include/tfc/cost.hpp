#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "tfc/control.hpp"
#include "tfc/geometry.hpp"
#include "tfc/pendulum.hpp"

namespace tfc {

struct CostParams {
  double Q = 1.0;               // weight on squared energy error
  double R = 100.0;             // weight on squared torque
  double fail_penalty = 1.0e4;  // added when a trial misses the feedback region

  bool valid() const { return Q > 0.0 && R > 0.0 && fail_penalty >= 0.0; }
};

// Integration settings for a single feedforward trial.
struct TrialConfig {
  double dt = 1.0e-3;
  double horizon = 10.0;
};

struct TrialOutcome {
  double J = 0.0;            // quadrature plus penalty
  double quadrature = 0.0;   // integral of the stage cost up to the stop event
  bool success = false;
  bool stalled = false;
  std::optional<State> reentry_state;
  double t_end = 0.0;
};

// Q (E(s) - E_final)^2 + R u^2
double stage_cost(const State& s, double u, const CostParams& cp, const PhysicalParams& p);

// Trapezoidal quadrature of the stage cost over all samples.
double trial_cost(const Trajectory& traj, const CostParams& cp, const PhysicalParams& p);

// Same over samples [first, last].
double trial_cost(const Trajectory& traj, std::size_t first, std::size_t last, const CostParams& cp,
                  const PhysicalParams& p);

// Work done by the held torque between the samples nearest t_a and t_b:
// per step, u_k times the trapezoid of theta_dot.
double delta_energy(const Trajectory& traj, double t_a, double t_b);

// Rolls one trial from the exit boundary (theta = pi + w, theta_dot_0) with
// the protocol timer started at t = 0, until re-entry at the opposite edge of
// the window one revolution later, a stall, or the horizon.
TrialOutcome evaluate_protocol(double theta_dot_0, const Protocol& proto, const CostParams& cp,
                               const RegionConfig& cfg, const TrialConfig& trial = {});

// The trajectory behind evaluate_protocol, for plotting and diagnostics.
Trajectory trial_trajectory(double theta_dot_0, const Protocol& proto, const RegionConfig& cfg,
                            const TrialConfig& trial = {});

struct TrialRow {
  double theta_dot_0 = 0.0;
  Protocol protocol;
  TrialOutcome outcome;
};

// theta_dot_0,t1,tau,J,success,stalled,reentry_theta,reentry_theta_dot
void write_trial_csv(std::ostream& out, const std::vector<TrialRow>& rows);

}  // namespace tfc
