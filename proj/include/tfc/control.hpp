#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "tfc/geometry.hpp"
#include "tfc/pendulum.hpp"

namespace tfc {

// Timed bang-bang feedforward action: after a decision-boundary crossing,
// wait t1 seconds, then hold u_on for tau seconds.
struct Protocol {
  double t1 = 0.0;
  double tau = 0.0;
  double u_on = -3.0;

  bool valid(double u_max) const { return t1 >= 0.0 && tau >= 0.0 && std::abs(u_on) <= u_max; }
  bool operator==(const Protocol&) const = default;
};

struct ProtocolEntry {
  double theta_dot_0 = 0.0;
  Protocol protocol;
  double cost = 0.0;
};

struct ProtocolTable {
  std::vector<ProtocolEntry> entries;

  // theta_dot_0 strictly increasing and every protocol within bounds
  bool valid(double u_max) const;
};

// clamp(-k1 wrap(theta - pi) - k2 theta_dot, -u_max, u_max)
double feedback_torque(const State& s, const FeedbackGains& gains, const PhysicalParams& p);

// u_on on the closed window t1 <= t <= t1 + tau, else 0.
double protocol_torque(double t, const Protocol& proto);

// Torque held over the integration step [t, t + dt) under zero-order hold.
// The switch instants are snapped to the nearest sample: the step is on when
// its midpoint falls inside [t1, t1 + tau).
double protocol_step_torque(double t, double dt, const Protocol& proto);

// Gains from the linearization at the inverted point, chosen so that A - BK has
// an eigenvector along the stable manifold slope -sqrt(-g/l). Throws
// Unstabilizable when the closed loop would not be Hurwitz.
FeedbackGains derive_gains(double k1, const PhysicalParams& p);

// The literal pair used by default, K = [1000, 309.9].
FeedbackGains default_gains();

// Eigenvalues of A - BK with A = [[0, 1], [-g/l, 0]], B = [0, 1/(m l^2)].
std::array<std::complex<double>, 2> closed_loop_eigenvalues(const FeedbackGains& gains,
                                                            const PhysicalParams& p);

// Picks the protocol to fire for an exit speed |theta_dot_0|. Returning
// nullopt means the speed is not covered.
using ProtocolSelector = std::function<std::optional<Protocol>(double speed)>;

// Nearest table entry by theta_dot_0; ties go to the higher entry.
ProtocolSelector selector_for(const ProtocolTable& table);

struct TriggerRecord {
  double t_cross = 0.0;
  double theta_dot_0 = 0.0;
  Direction direction = Direction::Positive;
  Protocol protocol;  // as executed, sign already mirrored for Negative exits
  bool out_of_range = false;
};

// Executes the combined feedback / feedforward decision scheme one step at a
// time. One instance per rollout; holds the protocol timer.
class HybridController {
 public:
  HybridController(RegionConfig cfg, FeedbackGains gains, ProtocolSelector selector, double dt,
                   double fallback_duration = 10.0);

  Command operator()(double t, const State& s);

  const std::vector<TriggerRecord>& triggers() const { return triggers_; }

 private:
  RegionConfig cfg_;
  FeedbackGains gains_;
  ProtocolSelector selector_;
  double dt_;
  double fallback_duration_;
  std::optional<Sample> prev_;
  std::optional<Protocol> active_;
  double timer_start_ = 0.0;
  std::vector<TriggerRecord> triggers_;
};

struct HybridRun {
  Trajectory trajectory;
  std::vector<TriggerRecord> triggers;
};

HybridRun run_hybrid(const State& s0, const ProtocolSelector& selector, double t_max, double dt,
                     const RegionConfig& cfg, const FeedbackGains& gains);

}  // namespace tfc
