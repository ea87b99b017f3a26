#pragma once

#include <optional>
#include <string_view>

#include "tfc/pendulum.hpp"

namespace tfc {

struct FeedbackGains {
  double k1 = 1000.0;   // N m / rad
  double k2 = 309.9;    // N m s / rad
};

// How the feedback region inside the visible window is carved out.
//
// Capture: states whose unstable-mode coordinate s = theta_dot + lambda x
// (x = theta - pi, lambda = sqrt(-g/l)) satisfies |s| <= u_max / (m l^2 lambda).
// Since ds/dt = lambda s + u / (m l^2) near the top, these are the states where
// the saturated torque can still arrest the unstable mode. The boundary lines
// run parallel to the stable manifold (the homoclinic direction).
//
// SaturationBand: states where the linear law is unsaturated, |k1 x + k2 theta_dot| <= u_max.
enum class RegionModel { Capture, SaturationBand };

std::string_view to_string(RegionModel model);
std::optional<RegionModel> region_model_from_string(std::string_view name);

struct RegionConfig {
  double visible_half_width = 0.3;
  double center = kPi;
  RegionModel model = RegionModel::Capture;
  PhysicalParams physical;
  FeedbackGains gains;

  bool valid() const;
  // Half-width in theta_dot of the capture band.
  double capture_half_width() const;
};

enum class Direction { Positive, Negative };

struct BoundaryCrossing {
  double t_cross = 0.0;      // s, valid when detected from timed samples
  double theta_dot_0 = 0.0;  // rad/s, interpolated at the boundary angle
  Direction direction = Direction::Positive;
};

// Signed offset from the inverted point, wrapped into (-pi, pi].
inline double offset_from_top(const State& s, const RegionConfig& cfg) {
  return wrap_to_pi(s.theta - cfg.center);
}

bool in_visible(const State& s, const RegionConfig& cfg);
bool in_feedback_region(const State& s, const RegionConfig& cfg);

// Crossing out of the visible window between two consecutive samples.
std::optional<BoundaryCrossing> detect_crossing(const State& prev, const State& next,
                                                const RegionConfig& cfg);
// Same, with sample times so the crossing time is interpolated too.
std::optional<BoundaryCrossing> detect_crossing(const Sample& prev, const Sample& next,
                                                const RegionConfig& cfg);

// Entry into the visible window from the obscured side between two samples.
// Returns the step fraction at which the boundary was reached.
std::optional<double> detect_entry(const State& prev, const State& next, const RegionConfig& cfg);

}  // namespace tfc
