#pragma once

#include <cmath>
#include <functional>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

namespace tfc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Frictionless point-mass pendulum, theta = 0 hanging down, theta = pi
// inverted. Gravity is signed: g < 0 makes the downward position stable.
struct PhysicalParams {
  double m = 1.0;
  double l = 1.0;
  double g = -10.0;
  double u_max = 3.0;

  // m l^2
  double inertia() const { return m * l * l; }
  // sqrt(-g / l): growth rate of the unstable mode at the inverted point.
  double inverted_rate() const { return std::sqrt(-g / l); }
  bool valid() const;
};

struct State {
  double theta = 0.0;      // rad, unwrapped
  double theta_dot = 0.0;  // rad/s

  // theta mapped into [0, 2 pi)
  State wrapped() const;
  bool finite() const { return std::isfinite(theta) && std::isfinite(theta_dot); }
};

struct StateDerivative {
  double d_theta = 0.0;
  double d_theta_dot = 0.0;
};

// Maps an angle into (-pi, pi].
double wrap_to_pi(double angle);
// Maps an angle into [0, 2 pi).
double wrap_to_two_pi(double angle);

// Reflection through the inverted point: (theta, theta_dot) -> (2 pi - theta, -theta_dot).
// Together with u -> -u this is an exact symmetry of the dynamics.
inline State mirror(const State& s) { return {kTwoPi - s.theta, -s.theta_dot}; }

StateDerivative derivative(const State& s, double u, const PhysicalParams& p);

// E = 1/2 m l^2 theta_dot^2 + m g l cos(theta)
double total_energy(const State& s, const PhysicalParams& p);

// Energy of the inverted equilibrium at rest, -m g l.
double target_energy(const PhysicalParams& p);

// One classical RK4 step with the torque held constant over the step.
State step_rk4(const State& s, double u, double dt, const PhysicalParams& p);

enum class ControlMode { Feedback, FeedforwardArmed, FeedforwardOn, Coast };

std::string_view to_string(ControlMode mode);

struct Sample {
  double t = 0.0;
  State state;
  double u = 0.0;  // torque held over [t, t + dt)
  ControlMode mode = ControlMode::Coast;
};

// Located crossing of a stop condition, interpolated between two samples.
struct Event {
  double t = 0.0;
  State state;
  std::size_t after_sample = 0;  // index of the last sample before the event
};

struct Trajectory {
  double dt = 0.0;
  std::vector<Sample> samples;
  std::optional<Event> event;

  bool empty() const { return samples.empty(); }
  const Sample& back() const { return samples.back(); }
  double duration() const { return samples.empty() ? 0.0 : samples.back().t - samples.front().t; }
};

struct Command {
  double u = 0.0;
  ControlMode mode = ControlMode::Coast;
};

// Control callback: (time, state) -> command. Called once per step, in order.
using ControlLaw = std::function<Command(double t, const State& s)>;

// Stop predicate over consecutive samples. Returns the fraction in [0, 1]
// along the step where the event happened, or nullopt.
using StopCondition = std::function<std::optional<double>(const Sample& prev, const Sample& next)>;

// Wraps a plain torque function; samples with nonzero torque are labelled
// FeedforwardOn, the rest Coast.
ControlLaw open_loop(std::function<double(double t, const State& s)> torque);

// Rolls the pendulum forward with fixed-step RK4 until t_max or until `stop`
// fires. Torque is clamped to [-u_max, u_max] before integration. Throws
// NonFinite if the state blows up.
Trajectory simulate(const State& s0, const ControlLaw& law, double t_max, double dt,
                    const StopCondition& stop, const PhysicalParams& p);

// CSV with header t,theta,theta_dot,u,mode,energy.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const PhysicalParams& p);

}  // namespace tfc
