#include "doctest.h"
#include "tfc/geometry.hpp"

using namespace tfc;

TEST_CASE("visible window") {
  const RegionConfig cfg;
  CHECK(in_visible({kPi, 5.0}, cfg));
  CHECK_FALSE(in_visible({0.0, 0.0}, cfg));
  CHECK(in_visible({kPi + 0.3, 1.0}, cfg));
  CHECK(in_visible({3 * kPi - 0.2, 1.0}, cfg));
}

TEST_CASE("saturation band region") {
  RegionConfig cfg;
  cfg.model = RegionModel::SaturationBand;
  CHECK(in_feedback_region({kPi, 0.0}, cfg));
  CHECK_FALSE(in_feedback_region({kPi + 0.3, 0.0}, cfg));
  CHECK(in_feedback_region({kPi + 0.01, -0.032268}, cfg));
}

TEST_CASE("capture band region") {
  const RegionConfig cfg;
  // u_max / sqrt(10)
  CHECK(cfg.capture_half_width() == doctest::Approx(0.9486833));
  CHECK(in_feedback_region({kPi, 0.9}, cfg));
  CHECK_FALSE(in_feedback_region({kPi, 0.95}, cfg));
  CHECK(in_feedback_region({kPi + 0.3, -0.9487}, cfg));
  CHECK(in_feedback_region({kPi + 0.3, 0.0}, cfg));  // on the edge, inclusive
  CHECK_FALSE(in_feedback_region({kPi + 0.3, 0.1}, cfg));
  CHECK_FALSE(in_feedback_region({kPi + 0.31, -0.98}, cfg));
}

TEST_CASE("region model names") {
  CHECK(region_model_from_string("capture") == RegionModel::Capture);
  CHECK(region_model_from_string("saturation_band") == RegionModel::SaturationBand);
  CHECK_FALSE(region_model_from_string("box").has_value());
  CHECK(to_string(RegionModel::Capture) == "capture");
}

TEST_CASE("window exit crossings") {
  const RegionConfig cfg;
  auto c = detect_crossing(State{kPi + 0.29, 2.0}, State{kPi + 0.31, 2.0}, cfg);
  REQUIRE(c);
  CHECK(c->theta_dot_0 == doctest::Approx(2.0));
  CHECK(c->direction == Direction::Positive);
  c = detect_crossing(State{kPi - 0.29, -3.0}, State{kPi - 0.31, -3.0}, cfg);
  REQUIRE(c);
  CHECK(c->direction == Direction::Negative);
  CHECK_FALSE(detect_crossing(State{kPi + 0.25, 2.0}, State{kPi + 0.27, 2.0}, cfg));
}

TEST_CASE("crossing time is interpolated") {
  const RegionConfig cfg;
  const Sample a{1.0, {kPi + 0.29, 2.0}, 0.0, ControlMode::Feedback};
  const Sample b{1.01, {kPi + 0.31, 2.0}, 0.0, ControlMode::Feedback};
  const auto c = detect_crossing(a, b, cfg);
  REQUIRE(c);
  CHECK(c->t_cross == doctest::Approx(1.005));
}

TEST_CASE("entry from the obscured side") {
  const RegionConfig cfg;
  const auto f = detect_entry({3 * kPi - 0.32, 2.0}, {3 * kPi - 0.28, 2.0}, cfg);
  REQUIRE(f);
  CHECK(*f == doctest::Approx(0.5));
  CHECK_FALSE(detect_entry({kPi, 1.0}, {kPi + 0.01, 1.0}, cfg));
}
