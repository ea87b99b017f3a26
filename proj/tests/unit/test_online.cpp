#include <cmath>
#include <sstream>

#include "doctest.h"
#include "tfc/online.hpp"

using namespace tfc;

namespace {

const PhysicalParams P;
const CostParams C;
const RegionConfig R;

const OnlineResult& default_run() {
  static const OnlineResult r = run_online(OnlineConfig{}, C, R);
  return r;
}

}  // namespace

TEST_CASE("config grids") {
  const OnlineConfig cfg;
  CHECK(cfg.tau_values.size() == 13);
  CHECK(cfg.t1_values.size() == 9);
  CHECK(cfg.tau_values.front() == 0.0);
  CHECK(cfg.tau_values.back() == doctest::Approx(0.6));
  CHECK(cfg.t1_values.front() == doctest::Approx(0.2));
  CHECK(cfg.t1_values.back() == doctest::Approx(0.6));
  CHECK(cfg.valid());
  CHECK(cfg.bin_of(0.0) == 0);
  CHECK(cfg.bin_of(0.4) == 1);
  CHECK(cfg.bin_of(5.19) == 12);
  CHECK(cfg.bin_of(5.2) == -1);
  CHECK(cfg.bin_center(4) == doctest::Approx(1.8));
}

TEST_CASE("pump torque") {
  // E = 1/2 theta_dot^2 - 10 cos theta
  const State s{kPi / 2, 2.0};  // E = 2
  CHECK(pump_torque(s, 5.0, 0.2, P) == 3.0);
  CHECK(pump_torque(s, 1.9, 0.2, P) == 0.0);
  CHECK(pump_torque(s, 1.0, 0.2, P) == -3.0);
  CHECK(pump_torque({kPi / 2, -2.0}, 5.0, 0.2, P) == -3.0);
  CHECK(pump_torque({kPi / 2, -2.0}, 1.0, 0.2, P) == 3.0);
}

TEST_CASE("best cell per bin") {
  const OnlineConfig cfg;
  CostMatrix m(2, 9, 13);
  m.at(0, 3, 2) = {5.0, true, 1, 0.2};
  m.at(1, 1, 4) = {7.0, true, 1, 0.6};
  m.at(1, 6, 2) = {7.0, true, 1, 0.6};
  m.at(1, 0, 0) = {1.0, false, 1, 0.6};
  const auto best = best_protocols(m, cfg, -3.0);
  REQUIRE(best.table.entries.size() == 2);
  CHECK(best.table.entries[0].protocol.t1 == doctest::Approx(cfg.t1_values[3]));
  CHECK(best.table.entries[0].protocol.tau == doctest::Approx(cfg.tau_values[2]));
  CHECK(best.table.entries[0].theta_dot_0 == doctest::Approx(0.2));
  // equal cost: smaller tau wins
  CHECK(best.table.entries[1].protocol.tau == doctest::Approx(cfg.tau_values[2]));
  CHECK(best.table.entries[1].cost == 7.0);
  CHECK(best.missing_bins.empty());

  CostMatrix empty(1, 9, 13);
  const auto none = best_protocols(empty, cfg, -3.0);
  CHECK(none.table.entries.empty());
  CHECK(none.missing_bins == std::vector<int>{0});
}

TEST_CASE("online run finishes every bin with fewer trials than the full grid") {
  const OnlineConfig cfg;
  const OnlineResult& r = default_run();
  CHECK(r.completed);
  CHECK(r.missing_bins.empty());
  CHECK(r.table.entries.size() == 13);
  CHECK(static_cast<long>(r.trials.size()) < 13L * 9 * 13);
  CHECK(r.matrix.total_visits() == static_cast<long>(r.trials.size()));
  CHECK(r.revolutions >= static_cast<long>(r.trials.size()));
  // slow bins need no control and stop after the tau = 0 cell
  for (int b = 0; b < 4; ++b) {
    int visited = 0;
    for (int i1 = 0; i1 < r.matrix.n_t1(); ++i1) {
      for (int it = 0; it < r.matrix.n_tau(); ++it) visited += r.matrix.at(b, i1, it).visits > 0;
    }
    CHECK(visited <= 3);
    CHECK(r.table.entries[b].protocol.tau == 0.0);
  }
  // exit speeds land in the bin they were booked to
  for (const auto& t : r.trials) CHECK(cfg.bin_of(t.theta_dot_0) == t.bin);
}

TEST_CASE("tau grows across bins") {
  const OnlineResult& r = default_run();
  int drops = 0;
  for (std::size_t b = 1; b < r.table.entries.size(); ++b) {
    drops += r.table.entries[b].protocol.tau < r.table.entries[b - 1].protocol.tau - 1e-9;
  }
  CHECK(drops <= 1);
  CHECK(r.table.entries.back().protocol.tau > r.table.entries.front().protocol.tau);
}

TEST_CASE("seeded runs are identical") {
  const OnlineResult a = run_online(OnlineConfig{}, C, R);
  const OnlineResult& b = default_run();
  REQUIRE(a.trials.size() == b.trials.size());
  std::ostringstream ma, mb;
  write_cost_matrix_csv(ma, a.matrix, OnlineConfig{});
  write_cost_matrix_csv(mb, b.matrix, OnlineConfig{});
  CHECK(ma.str() == mb.str());
  std::ostringstream la, lb;
  write_trial_log(la, a.trials);
  write_trial_log(lb, b.trials);
  CHECK(la.str() == lb.str());

  OnlineConfig other;
  other.rng_seed = 99;
  const OnlineResult c = run_online(other, C, R);
  CHECK(c.trials.front().theta_dot_0 != b.trials.front().theta_dot_0);
}
