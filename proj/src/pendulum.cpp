#include "tfc/pendulum.hpp"

#include <algorithm>
#include <ostream>

#include "tfc/errors.hpp"
#include "tfc/format.hpp"

namespace tfc {

bool PhysicalParams::valid() const {
  return m > 0.0 && l > 0.0 && u_max > 0.0 && g < 0.0 && std::isfinite(m) && std::isfinite(l) &&
         std::isfinite(g) && std::isfinite(u_max);
}

double wrap_to_pi(double angle) {
  double w = std::fmod(angle + kPi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod leaves w in [0, 2 pi); shift so that +pi maps to +pi, not -pi
  if (w == 0.0) return kPi;
  return w - kPi;
}

double wrap_to_two_pi(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w -= kTwoPi;
  return w;
}

State State::wrapped() const { return {wrap_to_two_pi(theta), theta_dot}; }

StateDerivative derivative(const State& s, double u, const PhysicalParams& p) {
  return {s.theta_dot, (p.g / p.l) * std::sin(s.theta) + u / p.inertia()};
}

double total_energy(const State& s, const PhysicalParams& p) {
  return 0.5 * p.inertia() * s.theta_dot * s.theta_dot + p.m * p.g * p.l * std::cos(s.theta);
}

double target_energy(const PhysicalParams& p) { return -p.m * p.g * p.l; }

State step_rk4(const State& s, double u, double dt, const PhysicalParams& p) {
  const auto k1 = derivative(s, u, p);
  const auto k2 = derivative({s.theta + 0.5 * dt * k1.d_theta, s.theta_dot + 0.5 * dt * k1.d_theta_dot}, u, p);
  const auto k3 = derivative({s.theta + 0.5 * dt * k2.d_theta, s.theta_dot + 0.5 * dt * k2.d_theta_dot}, u, p);
  const auto k4 = derivative({s.theta + dt * k3.d_theta, s.theta_dot + dt * k3.d_theta_dot}, u, p);
  return {s.theta + dt / 6.0 * (k1.d_theta + 2.0 * k2.d_theta + 2.0 * k3.d_theta + k4.d_theta),
          s.theta_dot + dt / 6.0 * (k1.d_theta_dot + 2.0 * k2.d_theta_dot + 2.0 * k3.d_theta_dot + k4.d_theta_dot)};
}

std::string_view to_string(ControlMode mode) {
  switch (mode) {
    case ControlMode::Feedback:
      return "feedback";
    case ControlMode::FeedforwardArmed:
      return "armed";
    case ControlMode::FeedforwardOn:
      return "on";
    case ControlMode::Coast:
      return "coast";
  }
  return "coast";
}

ControlLaw open_loop(std::function<double(double, const State&)> torque) {
  return [torque = std::move(torque)](double t, const State& s) {
    const double u = torque(t, s);
    return Command{u, u != 0.0 ? ControlMode::FeedforwardOn : ControlMode::Coast};
  };
}

Trajectory simulate(const State& s0, const ControlLaw& law, double t_max, double dt,
                    const StopCondition& stop, const PhysicalParams& p) {
  if (!(dt > 0.0) || !(t_max > 0.0)) {
    throw Error("sim-core", "simulate", "dt and t_max must be positive");
  }
  if (!s0.finite()) throw NonFinite("sim-core", "simulate", "initial state is not finite");

  Trajectory traj;
  traj.dt = dt;
  const auto n_steps = static_cast<std::size_t>(std::llround(t_max / dt));
  traj.samples.reserve(std::min<std::size_t>(n_steps + 1, 1u << 20));

  auto command_at = [&](double t, const State& s) {
    Command c = law(t, s);
    c.u = std::clamp(c.u, -p.u_max, p.u_max);
    return c;
  };

  State s = s0;
  Command c = command_at(0.0, s);
  traj.samples.push_back({0.0, s, c.u, c.mode});
  for (std::size_t k = 1; k <= n_steps; ++k) {
    s = step_rk4(s, c.u, dt, p);
    if (!s.finite()) {
      throw NonFinite("sim-core", "simulate", "state left the finite range at step " + std::to_string(k));
    }
    const double t = static_cast<double>(k) * dt;
    c = command_at(t, s);
    traj.samples.push_back({t, s, c.u, c.mode});
    if (stop) {
      const auto& prev = traj.samples[traj.samples.size() - 2];
      const auto& next = traj.samples.back();
      if (auto frac = stop(prev, next)) {
        const double a = std::clamp(*frac, 0.0, 1.0);
        traj.event = Event{prev.t + a * dt,
                           {prev.state.theta + a * (next.state.theta - prev.state.theta),
                            prev.state.theta_dot + a * (next.state.theta_dot - prev.state.theta_dot)},
                           traj.samples.size() - 2};
        break;
      }
    }
  }
  return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const PhysicalParams& p) {
  out << "t,theta,theta_dot,u,mode,energy\n";
  for (const auto& smp : traj.samples) {
    out << fmt9(smp.t) << ',' << fmt9(smp.state.theta) << ',' << fmt9(smp.state.theta_dot) << ','
        << fmt9(smp.u) << ',' << to_string(smp.mode) << ',' << fmt9(total_energy(smp.state, p)) << '\n';
  }
}

}  // namespace tfc
