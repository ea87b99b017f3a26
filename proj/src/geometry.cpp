#include "tfc/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace tfc {

std::string_view to_string(RegionModel model) {
  return model == RegionModel::Capture ? "capture" : "saturation_band";
}

std::optional<RegionModel> region_model_from_string(std::string_view name) {
  if (name == "capture") return RegionModel::Capture;
  if (name == "saturation_band") return RegionModel::SaturationBand;
  return std::nullopt;
}

bool RegionConfig::valid() const {
  return visible_half_width > 0.0 && visible_half_width < kPi / 2.0 && std::isfinite(center) &&
         physical.valid();
}

double RegionConfig::capture_half_width() const {
  return physical.u_max / (physical.inertia() * physical.inverted_rate());
}

bool in_visible(const State& s, const RegionConfig& cfg) {
  return std::abs(offset_from_top(s, cfg)) <= cfg.visible_half_width;
}

bool in_feedback_region(const State& s, const RegionConfig& cfg) {
  if (!in_visible(s, cfg)) return false;
  const double x = offset_from_top(s, cfg);
  switch (cfg.model) {
    case RegionModel::Capture:
      return std::abs(s.theta_dot + cfg.physical.inverted_rate() * x) <= cfg.capture_half_width();
    case RegionModel::SaturationBand:
      return std::abs(cfg.gains.k1 * x + cfg.gains.k2 * s.theta_dot) <= cfg.physical.u_max;
  }
  return false;
}


std::optional<BoundaryCrossing> detect_crossing(const State& prev, const State& next,
                                                const RegionConfig& cfg) {
  if (!in_visible(prev, cfg) || in_visible(next, cfg)) return std::nullopt;
  // work on the unwrapped step so wrap-around at 0 / 2 pi is harmless
  const double x0 = offset_from_top(prev, cfg);
  const double x1 = x0 + (next.theta - prev.theta);
  const double edge = x1 > 0.0 ? cfg.visible_half_width : -cfg.visible_half_width;
  const double a = x1 == x0 ? 0.0 : std::clamp((edge - x0) / (x1 - x0), 0.0, 1.0);
  BoundaryCrossing c;
  c.theta_dot_0 = prev.theta_dot + a * (next.theta_dot - prev.theta_dot);
  c.direction = c.theta_dot_0 >= 0.0 ? Direction::Positive : Direction::Negative;
  c.t_cross = a;  // caller rescales with sample times
  return c;
}

std::optional<BoundaryCrossing> detect_crossing(const Sample& prev, const Sample& next,
                                                const RegionConfig& cfg) {
  auto c = detect_crossing(prev.state, next.state, cfg);
  if (c) c->t_cross = prev.t + c->t_cross * (next.t - prev.t);
  return c;
}

std::optional<double> detect_entry(const State& prev, const State& next, const RegionConfig& cfg) {
  if (in_visible(prev, cfg) || !in_visible(next, cfg)) return std::nullopt;
  const double x0 = offset_from_top(prev, cfg);
  const double x1 = x0 + (next.theta - prev.theta);
  const double w = cfg.visible_half_width;
  const double edge = x0 > 0.0 ? w : -w;
  const double span = x1 - x0;
  const double a = span == 0.0 ? 0.0 : (edge - x0) / span;
  return std::clamp(a, 0.0, 1.0);
}

}  // namespace tfc
