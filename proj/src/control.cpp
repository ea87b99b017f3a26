#include "tfc/control.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#include "tfc/errors.hpp"

namespace tfc {

bool ProtocolTable::valid(double u_max) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].protocol.valid(u_max)) return false;
    if (i > 0 && !(entries[i].theta_dot_0 > entries[i - 1].theta_dot_0)) return false;
  }
  return true;
}

double feedback_torque(const State& s, const FeedbackGains& gains, const PhysicalParams& p) {
  const double x = wrap_to_pi(s.theta - kPi);
  return std::clamp(-gains.k1 * x - gains.k2 * s.theta_dot, -p.u_max, p.u_max);
}

double protocol_torque(double t, const Protocol& proto) {
  return (t >= proto.t1 && t <= proto.t1 + proto.tau) ? proto.u_on : 0.0;
}

double protocol_step_torque(double t, double dt, const Protocol& proto) {
  if (!(proto.tau > 0.0)) return 0.0;
  const double mid = t + 0.5 * dt;
  return (mid >= proto.t1 && mid < proto.t1 + proto.tau) ? proto.u_on : 0.0;
}

std::array<std::complex<double>, 2> closed_loop_eigenvalues(const FeedbackGains& gains,
                                                            const PhysicalParams& p) {
  // characteristic polynomial: lambda^2 + (k2/I) lambda + (k1/I + g/l)
  const double b = gains.k2 / p.inertia();
  const double c = gains.k1 / p.inertia() + p.g / p.l;
  const std::complex<double> disc = std::sqrt(std::complex<double>(b * b - 4.0 * c, 0.0));
  return {(-b + disc) / 2.0, (-b - disc) / 2.0};
}

FeedbackGains derive_gains(double k1, const PhysicalParams& p) {
  if (!(k1 > 0.0)) throw Unstabilizable("control", "derive_gains", "k1 must be positive");
  // (A - BK) v = mu v with v = (1, -lambda) forces mu = -lambda and k2 = k1 / lambda
  const FeedbackGains gains{k1, k1 / p.inverted_rate()};
  for (const auto& ev : closed_loop_eigenvalues(gains, p)) {
    if (ev.real() >= 0.0) {
      throw Unstabilizable("control", "derive_gains",
                           "closed loop has an eigenvalue with non-negative real part");
    }
  }
  return gains;
}

FeedbackGains default_gains() { return {1000.0, 309.9}; }

ProtocolSelector selector_for(const ProtocolTable& table) {
  return [entries = table.entries](double speed) -> std::optional<Protocol> {
    if (entries.empty()) return std::nullopt;
    const ProtocolEntry* best = &entries.front();
    for (const auto& e : entries) {
      if (std::abs(e.theta_dot_0 - speed) <= std::abs(best->theta_dot_0 - speed)) best = &e;
    }
    return best->protocol;
  };
}

HybridController::HybridController(RegionConfig cfg, FeedbackGains gains, ProtocolSelector selector,
                                   double dt, double fallback_duration)
    : cfg_(std::move(cfg)),
      gains_(gains),
      selector_(std::move(selector)),
      dt_(dt),
      fallback_duration_(fallback_duration) {}

Command HybridController::operator()(double t, const State& s) {
  const Sample current{t, s, 0.0, ControlMode::Coast};
  const auto prev = std::exchange(prev_, current);

  if (in_feedback_region(s, cfg_)) {
    active_.reset();
    return {feedback_torque(s, gains_, cfg_.physical), ControlMode::Feedback};
  }

  if (prev) {
    if (auto crossing = detect_crossing(*prev, current, cfg_)) {
      const double speed = std::abs(crossing->theta_dot_0);
      TriggerRecord rec{crossing->t_cross, crossing->theta_dot_0, crossing->direction, {}, false};
      auto chosen = selector_ ? selector_(speed) : std::nullopt;
      if (!chosen) {
        rec.out_of_range = true;
        chosen = Protocol{0.0, fallback_duration_, -cfg_.physical.u_max};
      }
      if (crossing->direction == Direction::Negative) chosen->u_on = -chosen->u_on;
      rec.protocol = *chosen;
      triggers_.push_back(rec);
      active_ = chosen;
      timer_start_ = crossing->t_cross;
      return {0.0, ControlMode::FeedforwardArmed};
    }
  }

  if (active_) {
    const double since = t - timer_start_;
    const double u = protocol_step_torque(since, dt_, *active_);
    if (u != 0.0) return {u, ControlMode::FeedforwardOn};
    if (since + 0.5 * dt_ < active_->t1) return {0.0, ControlMode::FeedforwardArmed};
    active_.reset();
  }
  return {0.0, ControlMode::Coast};
}

HybridRun run_hybrid(const State& s0, const ProtocolSelector& selector, double t_max, double dt,
                     const RegionConfig& cfg, const FeedbackGains& gains) {
  auto controller = std::make_shared<HybridController>(cfg, gains, selector, dt, t_max);
  HybridRun run;
  run.trajectory = simulate(
      s0, [controller](double t, const State& s) { return (*controller)(t, s); }, t_max, dt, {},
      cfg.physical);
  run.triggers = controller->triggers();
  return run;
}

}  // namespace tfc
