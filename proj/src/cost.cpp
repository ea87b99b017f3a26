#include "tfc/cost.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "tfc/errors.hpp"
#include "tfc/format.hpp"

namespace tfc {

double stage_cost(const State& s, double u, const CostParams& cp, const PhysicalParams& p) {
  const double e = total_energy(s, p) - target_energy(p);
  return cp.Q * e * e + cp.R * u * u;
}

double trial_cost(const Trajectory& traj, std::size_t first, std::size_t last, const CostParams& cp,
                  const PhysicalParams& p) {
  if (traj.samples.size() < 2 || first >= last) return 0.0;
  last = std::min(last, traj.samples.size() - 1);
  double sum = 0.0;
  double prev = stage_cost(traj.samples[first].state, traj.samples[first].u, cp, p);
  for (std::size_t k = first + 1; k <= last; ++k) {
    const double cur = stage_cost(traj.samples[k].state, traj.samples[k].u, cp, p);
    sum += 0.5 * (prev + cur) * (traj.samples[k].t - traj.samples[k - 1].t);
    prev = cur;
  }
  return sum;
}

double trial_cost(const Trajectory& traj, const CostParams& cp, const PhysicalParams& p) {
  if (traj.samples.empty()) return 0.0;
  return trial_cost(traj, 0, traj.samples.size() - 1, cp, p);
}

double delta_energy(const Trajectory& traj, double t_a, double t_b) {
  if (traj.samples.size() < 2 || !(t_b > t_a)) return 0.0;
  const double t0 = traj.samples.front().t;
  const auto n = traj.samples.size();
  auto index_of = [&](double t) {
    const auto k = static_cast<long long>(std::llround((t - t0) / traj.dt));
    return static_cast<std::size_t>(std::clamp<long long>(k, 0, static_cast<long long>(n - 1)));
  };
  const std::size_t a = index_of(t_a);
  const std::size_t b = index_of(t_b);
  double work = 0.0;
  for (std::size_t k = a; k < b; ++k) {
    const auto& s0 = traj.samples[k];
    const auto& s1 = traj.samples[k + 1];
    work += s0.u * 0.5 * (s0.state.theta_dot + s1.state.theta_dot) * (s1.t - s0.t);
  }
  return work;
}

namespace {

StopCondition trial_stop(double reentry_theta) {
  return [reentry_theta](const Sample& prev, const Sample& next) -> std::optional<double> {
    const double th0 = prev.state.theta;
    const double th1 = next.state.theta;
    if (th0 < reentry_theta && th1 >= reentry_theta) return (reentry_theta - th0) / (th1 - th0);
    if (next.state.theta_dot <= 0.0) {
      const double v0 = prev.state.theta_dot;
      const double v1 = next.state.theta_dot;
      return v0 == v1 ? 1.0 : v0 / (v0 - v1);
    }
    return std::nullopt;
  };
}

}  // namespace

Trajectory trial_trajectory(double theta_dot_0, const Protocol& proto, const RegionConfig& cfg,
                            const TrialConfig& trial) {
  const State s0{cfg.center + cfg.visible_half_width, theta_dot_0};
  const double reentry_theta = s0.theta + kTwoPi - 2.0 * cfg.visible_half_width;
  const double dt = trial.dt;
  return simulate(
      s0, open_loop([&proto, dt](double t, const State&) { return protocol_step_torque(t, dt, proto); }),
      trial.horizon, dt, trial_stop(reentry_theta), cfg.physical);
}

TrialOutcome evaluate_protocol(double theta_dot_0, const Protocol& proto, const CostParams& cp,
                               const RegionConfig& cfg, const TrialConfig& trial) {
  if (!(theta_dot_0 > 0.0)) {
    throw Error("cost", "evaluate_protocol", "theta_dot_0 must be positive");
  }
  const Trajectory traj = trial_trajectory(theta_dot_0, proto, cfg, trial);
  const PhysicalParams& p = cfg.physical;

  TrialOutcome out;
  if (traj.event) {
    const auto& ev = *traj.event;
    const auto& before = traj.samples[ev.after_sample];
    out.quadrature = trial_cost(traj, 0, ev.after_sample, cp, p) +
                     0.5 * (stage_cost(before.state, before.u, cp, p) + stage_cost(ev.state, before.u, cp, p)) *
                         (ev.t - before.t);
    out.t_end = ev.t;
    if (ev.state.theta_dot <= 0.0) {
      out.stalled = true;
    } else {
      out.reentry_state = ev.state;
      out.success = in_feedback_region(ev.state, cfg);
    }
  } else {
    out.quadrature = trial_cost(traj, cp, p);
    out.t_end = traj.samples.back().t;
  }
  out.J = out.quadrature + (out.success ? 0.0 : cp.fail_penalty);
  return out;
}

void write_trial_csv(std::ostream& out, const std::vector<TrialRow>& rows) {
  out << "theta_dot_0,t1,tau,J,success,stalled,reentry_theta,reentry_theta_dot\n";
  for (const auto& r : rows) {
    const auto& o = r.outcome;
    out << fmt9(r.theta_dot_0) << ',' << fmt9(r.protocol.t1) << ',' << fmt9(r.protocol.tau) << ','
        << fmt9(o.J) << ',' << (o.success ? 1 : 0) << ',' << (o.stalled ? 1 : 0) << ','
        << (o.reentry_state ? fmt9(o.reentry_state->theta) : std::string{}) << ','
        << (o.reentry_state ? fmt9(o.reentry_state->theta_dot) : std::string{}) << '\n';
  }
}

}  // namespace tfc
