#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tfc/cost.hpp"
#include "tfc/geometry.hpp"
#include "tfc/pendulum.hpp"

namespace tfc {

// Tensor grid over theta in [0, 2 pi) (periodic) and theta_dot in
// [-theta_dot_max, theta_dot_max] (clamped at the edges).
struct DpGrid {
  int n_theta = 401;
  int n_theta_dot = 401;
  double theta_dot_max = 8.0;
  double h = 0.02;
  std::vector<double> actions{-3.0, 0.0, 3.0};
  double tol = 1.0e-6;
  long max_iters = 100000;

  bool valid() const;
  std::size_t size() const { return static_cast<std::size_t>(n_theta) * n_theta_dot; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_theta_dot + j; }
  double theta_at(int i) const { return kTwoPi * i / n_theta; }
  double theta_dot_at(int j) const { return -theta_dot_max + 2.0 * theta_dot_max * j / (n_theta_dot - 1); }
  double d_theta() const { return kTwoPi / n_theta; }
  double d_theta_dot() const { return 2.0 * theta_dot_max / (n_theta_dot - 1); }
  // index of the action mirrored under u -> -u, or -1
  int mirrored_action(int a) const;
};

struct PolicyField {
  DpGrid grid;
  std::vector<double> value;
  std::vector<std::uint8_t> policy;     // action index per cell
  std::vector<std::uint8_t> goal_mask;  // feedback-region cells
  long iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;  // sup-norm update per sweep
  // Cost slack for comparisons against continuous-time protocols: switching
  // is resolved only to one DP step, so each on/off switch may cost up to
  // R u_max^2 h extra. Two switches per burst.
  double slack = 0.0;

  double value_at(int i, int j) const { return value[grid.index(i, j)]; }
  int action_at(int i, int j) const { return policy[grid.index(i, j)]; }
  // bilinear, periodic in theta, clamped in theta_dot
  double interpolate(const State& s) const;
  // action index of the nearest cell
  int nearest_action(const State& s) const;
};

// Undiscounted value iteration with absorbing goal cells at zero cost.
// Synchronous (Jacobi) sweeps; throws NoConvergence at the iteration cap.
PolicyField value_iteration(const DpGrid& grid, const CostParams& cp, const RegionConfig& cfg, int threads = 1);

struct PolicyRollout {
  Trajectory trajectory;
  bool reached_goal = false;
  double cost = 0.0;  // trapezoidal stage-cost quadrature up to goal entry
};

// Greedy rollout of the nearest-cell action until the state enters the feedback
// region or t_max. Throws GridExit if |theta_dot| leaves the grid.
PolicyRollout policy_rollout(const State& s0, const PolicyField& field, double t_max, double dt,
                             const CostParams& cp, const RegionConfig& cfg);

// theta,theta_dot,action  (action as torque)
void write_policy_csv(std::ostream& out, const PolicyField& field);

}  // namespace tfc
