#include "doctest.h"
#include "tfc/errors.hpp"
#include "tfc/protocol_min.hpp"

using namespace tfc;

namespace {

MinimalSet three() {
  MinimalSet s;
  s.protocols = {{"U1", {0.0, 0.0, -3.0}, 0.0, 1.8, 0.05},
                 {"U2", {0.5, 0.1, -3.0}, 1.8, 3.0, 2.5},
                 {"U3", {0.4, 0.3, -3.0}, 3.0, 5.0, 4.0}};
  return s;
}

}  // namespace

TEST_CASE("one coasting protocol covers the slow range") {
  CoverConfig cfg;
  cfg.cover_max = 1.5;
  ProtocolTable t;
  t.entries = {{1.5, {0.0, 0.0, -3.0}, 0.0}};
  const MinimalSet s = minimal_cover(t, cfg);
  REQUIRE(s.protocols.size() == 1);
  CHECK(s.protocols[0].label == "U1");
  CHECK(s.protocols[0].lo == 0.0);
  CHECK(s.protocols[0].hi == doctest::Approx(1.5));
  CHECK(s.valid());
}

TEST_CASE("uncoverable speeds raise a coverage gap") {
  CoverConfig cfg;
  cfg.cover_max = 3.0;
  ProtocolTable t;
  t.entries = {{1.0, {0.0, 0.0, -3.0}, 0.0}};
  CHECK_THROWS_AS(minimal_cover(t, cfg), CoverageGap);
  CHECK_THROWS_AS(minimal_cover(ProtocolTable{}, cfg), CoverageGap);
}

TEST_CASE("a failing protocol hands over to the highest one that works") {
  CoverConfig cfg;
  cfg.cover_max = 2.5;
  ProtocolTable t;
  // the middle entry works at 2.0-2.5 but is never needed once the top one takes over
  t.entries = {{1.0, {0.0, 0.0, -3.0}, 0.0}, {2.2, {0.5, 0.05, -3.0}, 0.0}, {2.5, {0.5, 0.1, -3.0}, 0.0}};
  const MinimalSet s = minimal_cover(t, cfg);
  REQUIRE(s.valid());
  CHECK(s.protocols.front().protocol.tau == 0.0);
  CHECK(s.cover_max() == doctest::Approx(2.5));
  for (double v = 0.05; v <= 2.5 + 1e-9; v += 0.05) {
    CHECK(evaluate_protocol(v, assign_protocol(v, s).protocol, cfg.cost, cfg.region, cfg.trial).success);
  }
}

TEST_CASE("assignment by validity interval") {
  const MinimalSet s = three();
  CHECK(assign_protocol(0.5, s).label == "U1");
  CHECK(assign_protocol(1.8, s).label == "U2");
  CHECK(assign_protocol(3.0, s).label == "U3");
  CHECK(assign_protocol(5.0, s).label == "U3");
  CHECK_THROWS_AS(assign_protocol(5.6, s), OutOfRange);
  CHECK_THROWS_AS(assign_protocol(-0.1, s), OutOfRange);
  CHECK_FALSE(selector_for(s)(5.6).has_value());
  CHECK(selector_for(s)(2.0)->t1 == 0.5);
}

TEST_CASE("set validity") {
  MinimalSet s = three();
  CHECK(s.valid());
  s.protocols[1].lo = 1.7;
  CHECK_FALSE(s.valid());
  CHECK_FALSE(MinimalSet{}.valid());
}
