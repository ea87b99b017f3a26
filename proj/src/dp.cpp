#include "tfc/dp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "tfc/errors.hpp"
#include "tfc/format.hpp"
#include "tfc/parallel.hpp"

namespace tfc {

bool DpGrid::valid() const {
  if (n_theta < 2 || n_theta_dot < 2 || !(h > 0.0) || !(theta_dot_max > 0.0) || !(tol > 0.0) || max_iters < 1) {
    return false;
  }
  return !actions.empty() && actions.size() <= 255;
}

int DpGrid::mirrored_action(int a) const {
  for (std::size_t b = 0; b < actions.size(); ++b) {
    if (actions[b] == -actions[static_cast<std::size_t>(a)]) return static_cast<int>(b);
  }
  return -1;
}

namespace {

struct Stencil {
  std::array<std::uint32_t, 4> idx{};
  std::array<double, 4> w{};
};

Stencil stencil(const DpGrid& g, const State& s) {
  const double fi = wrap_to_two_pi(s.theta) / g.d_theta();
  auto i0 = static_cast<int>(std::floor(fi));
  const double wi = fi - i0;
  i0 %= g.n_theta;
  const int i1 = (i0 + 1) % g.n_theta;

  const double fj = std::clamp((s.theta_dot + g.theta_dot_max) / g.d_theta_dot(), 0.0,
                               static_cast<double>(g.n_theta_dot - 1));
  const int j0 = std::min(static_cast<int>(std::floor(fj)), g.n_theta_dot - 2);
  const double wj = fj - j0;

  Stencil st;
  st.idx = {static_cast<std::uint32_t>(g.index(i0, j0)), static_cast<std::uint32_t>(g.index(i0, j0 + 1)),
            static_cast<std::uint32_t>(g.index(i1, j0)), static_cast<std::uint32_t>(g.index(i1, j0 + 1))};
  st.w = {(1.0 - wi) * (1.0 - wj), (1.0 - wi) * wj, wi * (1.0 - wj), wi * wj};
  return st;
}

// Action preference for ties: zero torque first, then by index.
std::vector<int> action_order(const DpGrid& g) {
  std::vector<int> order(g.actions.size());
  for (std::size_t a = 0; a < order.size(); ++a) order[a] = static_cast<int>(a);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return (g.actions[a] == 0.0) > (g.actions[b] == 0.0); });
  return order;
}

}  // namespace

double PolicyField::interpolate(const State& s) const {
  const Stencil st = stencil(grid, s);
  double v = 0.0;
  for (int k = 0; k < 4; ++k) v += st.w[k] * value[st.idx[k]];
  return v;
}

int PolicyField::nearest_action(const State& s) const {
  auto i = static_cast<int>(std::llround(wrap_to_two_pi(s.theta) / grid.d_theta())) % grid.n_theta;
  const auto j = static_cast<int>(std::clamp<long long>(
      std::llround((s.theta_dot + grid.theta_dot_max) / grid.d_theta_dot()), 0, grid.n_theta_dot - 1));
  return action_at(i, j);
}

PolicyField value_iteration(const DpGrid& grid, const CostParams& cp, const RegionConfig& cfg, int threads) {
  if (!grid.valid()) throw Error("dp-benchmark", "value_iteration", "invalid grid");
  const PhysicalParams& p = cfg.physical;
  const std::size_t n = grid.size();
  const std::size_t n_act = grid.actions.size();

  PolicyField field;
  field.grid = grid;
  field.value.assign(n, 0.0);
  field.policy.assign(n, 0);
  field.goal_mask.assign(n, 0);
  field.slack = 2.0 * cp.R * p.u_max * p.u_max * grid.h;

  // transitions and stage costs are fixed; build them once
  std::vector<Stencil> next(n * n_act);
  std::vector<double> step_cost(n * n_act);
  std::size_t goal_count = 0;
  parallel_for(static_cast<std::size_t>(grid.n_theta), threads, [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = 0; j < grid.n_theta_dot; ++j) {
      const std::size_t c = grid.index(i, j);
      const State s{grid.theta_at(i), grid.theta_dot_at(j)};
      field.goal_mask[c] = in_feedback_region(s, cfg) ? 1 : 0;
      for (std::size_t a = 0; a < n_act; ++a) {
        const double u = std::clamp(grid.actions[a], -p.u_max, p.u_max);
        next[c * n_act + a] = stencil(grid, step_rk4(s, u, grid.h, p));
        step_cost[c * n_act + a] = stage_cost(s, u, cp, p) * grid.h;
      }
    }
  });
  for (auto g : field.goal_mask) goal_count += g;
  if (goal_count == 0) throw NoConvergence("dp-benchmark", "value_iteration", "goal set is empty");

  const auto order = action_order(grid);
  std::vector<double> fresh(n, 0.0);
  const int rows = grid.n_theta;
  std::vector<double> row_residual(static_cast<std::size_t>(rows));

  for (field.iterations = 1; field.iterations <= grid.max_iters; ++field.iterations) {
    const auto& old = field.value;
    parallel_for(static_cast<std::size_t>(rows), threads, [&](std::size_t ii) {
      double res = 0.0;
      for (int j = 0; j < grid.n_theta_dot; ++j) {
        const std::size_t c = grid.index(static_cast<int>(ii), j);
        if (field.goal_mask[c]) {
          fresh[c] = 0.0;
          continue;
        }
        double best = 0.0;
        int best_a = -1;
        for (int a : order) {
          const std::size_t k = c * n_act + static_cast<std::size_t>(a);
          const Stencil& st = next[k];
          const double q = step_cost[k] + st.w[0] * old[st.idx[0]] + st.w[1] * old[st.idx[1]] +
                           st.w[2] * old[st.idx[2]] + st.w[3] * old[st.idx[3]];
          // relative tie band so round-off never decides between mirrored actions
          if (best_a < 0 || q < best - 1e-12 * std::max(1.0, std::abs(best))) {
            best = q;
            best_a = a;
          }
        }
        fresh[c] = best;
        field.policy[c] = static_cast<std::uint8_t>(best_a);
        res = std::max(res, std::abs(best - old[c]));
      }
      row_residual[ii] = res;
    });
    field.residual = *std::max_element(row_residual.begin(), row_residual.end());
    field.residual_history.push_back(field.residual);
    field.value.swap(fresh);
    if (field.residual < grid.tol) return field;
  }
  field.iterations = grid.max_iters;
  throw NoConvergence("dp-benchmark", "value_iteration",
                      "sup-norm residual " + fmt9(field.residual) + " after " +
                          std::to_string(grid.max_iters) + " sweeps");
}

PolicyRollout policy_rollout(const State& s0, const PolicyField& field, double t_max, double dt,
                             const CostParams& cp, const RegionConfig& cfg) {
  const auto& g = field.grid;
  auto check = [&](const State& s) {
    if (std::abs(s.theta_dot) > g.theta_dot_max) {
      throw GridExit("dp-benchmark", "policy_rollout", "theta_dot = " + fmt9(s.theta_dot) + " left the grid");
    }
  };
  check(s0);

  PolicyRollout out;
  if (in_feedback_region(s0, cfg)) {
    out.reached_goal = true;
    out.trajectory.dt = dt;
    return out;
  }
  const ControlLaw law = [&](double, const State& s) {
    check(s);
    const double u = g.actions[static_cast<std::size_t>(field.nearest_action(s))];
    return Command{u, u != 0.0 ? ControlMode::FeedforwardOn : ControlMode::Coast};
  };
  const StopCondition reached = [&](const Sample&, const Sample& next) -> std::optional<double> {
    if (in_feedback_region(next.state, cfg)) return 1.0;
    return std::nullopt;
  };
  out.trajectory = simulate(s0, law, t_max, dt, reached, cfg.physical);
  out.reached_goal = out.trajectory.event.has_value();
  out.cost = trial_cost(out.trajectory, cp, cfg.physical);
  return out;
}

void write_policy_csv(std::ostream& out, const PolicyField& field) {
  const auto& g = field.grid;
  out << "theta,theta_dot,action\n";
  for (int i = 0; i < g.n_theta; ++i) {
    for (int j = 0; j < g.n_theta_dot; ++j) {
      out << fmt9(g.theta_at(i)) << ',' << fmt9(g.theta_dot_at(j)) << ','
          << fmt9(g.actions[field.action_at(i, j)]) << '\n';
    }
  }
}

}  // namespace tfc
