#include <cmath>

#include "doctest.h"
#include "tfc/errors.hpp"
#include "tfc/online.hpp"
#include "tfc/optimize.hpp"

using namespace tfc;

TEST_CASE("nelder-mead on a convex quadratic") {
  NmConfig nm;
  nm.f_tol_rel = 0.0;
  nm.f_tol_abs = 1e-14;
  nm.x_tol = 1e-8;
  const auto r = nelder_mead([](const Point2& x) { return std::pow(x[0] - 0.3, 2) + std::pow(x[1] - 0.1, 2); },
                             {1.0, 1.0}, nm);
  CHECK(r.x_best[0] == doctest::Approx(0.3).epsilon(1e-4));
  CHECK(r.x_best[1] == doctest::Approx(0.1).epsilon(1e-4));
  CHECK(r.simplex_f[0] == r.f_best);
}

TEST_CASE("rosenbrock with restarts") {
  NmConfig nm;
  nm.f_tol_rel = 0.0;
  nm.f_tol_abs = 1e-14;
  nm.x_tol = 1e-10;
  nm.max_iters = 2000;
  HopConfig hop;
  hop.n_hops = 4;
  hop.perturbation_scale = {0.05, 0.05};
  const Objective2 rosen = [](const Point2& x) {
    return std::pow(1.0 - x[0], 2) + 100.0 * std::pow(x[1] - x[0] * x[0], 2);
  };
  const auto r = basin_hop(rosen, {-1.2, 1.0}, nm, hop);
  CHECK(r.f_best < 1e-6);
  CHECK(r.x_best[0] == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("box bounds clamp evaluations") {
  NmConfig nm;
  nm.bounds = Box2{{0.0, 0.0}, {1.0, 1.0}};
  const auto r = nelder_mead([](const Point2& x) { return std::pow(x[0] + 1.0, 2) + std::pow(x[1] - 0.5, 2); },
                             {0.5, 0.5}, nm);
  CHECK(r.x_best[0] == doctest::Approx(0.0));
  CHECK(r.x_best[1] == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("one hop is one nelder-mead run") {
  const Objective2 f = [](const Point2& x) { return std::pow(x[0] - 0.7, 2) + 3.0 * std::pow(x[1] - 0.2, 2); };
  NmConfig nm;
  HopConfig hop;
  hop.n_hops = 1;
  const auto a = basin_hop(f, {0.1, 0.9}, nm, hop);
  const auto b = nelder_mead(f, {0.1, 0.9}, nm);
  CHECK(a.x_best == b.x_best);
  CHECK(a.f_best == b.f_best);
  CHECK(a.evals == b.evals);
}

TEST_CASE("equal wells keep the first one found") {
  // flat-bottomed wells around t1 = 0.3 and t1 = 1.3, both exactly zero
  auto well = [](double d) { return std::pow(std::max(0.0, std::abs(d) - 0.05), 2); };
  const Objective2 f = [&](const Point2& x) {
    return std::min(well(x[0] - 0.3), well(x[0] - 1.3)) + well(x[1] - 0.5);
  };
  NmConfig nm;
  HopConfig hop;
  hop.n_hops = 8;
  hop.perturbation_scale = {1.0, 0.1};
  hop.rng_seed = 3;
  const auto r = basin_hop(f, {0.4, 0.5}, nm, hop);
  CHECK(r.f_best == 0.0);
  CHECK(r.x_best[0] == doctest::Approx(0.3).epsilon(0.1));
  bool other_found = false;
  for (const auto& run : r.runs) other_found = other_found || (run.f_best == 0.0 && run.x_best[0] > 1.0);
  CHECK(other_found);
}

TEST_CASE("seeded hopping is reproducible") {
  const Objective2 f = [](const Point2& x) { return std::sin(5 * x[0]) + std::cos(7 * x[1]) + x[0] * x[0]; };
  NmConfig nm;
  HopConfig hop;
  hop.rng_seed = 11;
  const auto a = basin_hop(f, {0.5, 0.5}, nm, hop);
  const auto b = basin_hop(f, {0.5, 0.5}, nm, hop);
  CHECK(a.x_best == b.x_best);
  CHECK(a.f_best == b.f_best);
  CHECK(a.evals == b.evals);
}

TEST_CASE("protocol search beats every online grid cell") {
  const OfflineConfig cfg;
  const OnlineConfig grid;
  const auto best = search_protocol(3.0, cfg);
  CHECK(best.outcome.success);
  double grid_best = 1e300;
  for (double t1 : grid.t1_values) {
    for (double tau : grid.tau_values) {
      const double j = evaluate_protocol(3.0, {t1, tau, -3.0}, cfg.cost, cfg.region, cfg.trial).J;
      grid_best = std::min(grid_best, j);
      CHECK(best.outcome.J <= j + 1e-9);
    }
  }
  CHECK(best.outcome.J <= grid_best);
}

TEST_CASE("slow exits need no control") {
  const OfflineConfig cfg;
  const auto r = optimize_protocol(1.0, cfg);
  CHECK(r.protocol.t1 == 0.0);
  CHECK(r.protocol.tau == 0.0);
  CHECK(r.outcome.success);
}

TEST_CASE("very fast exits are infeasible") {
  const OfflineConfig cfg;
  CHECK_THROWS_AS(optimize_protocol(6.5, cfg), NoFeasibleProtocol);
}

TEST_CASE("sweep rows are deterministic and duplicates collapse") {
  const OfflineConfig cfg;
  const auto r = sweep({0.4, 0.8, 1.2, 1.6, 1.6}, cfg, 2);
  REQUIRE(r.rows.size() == 5);
  CHECK(r.table.entries.size() == 4);
  for (const auto& e : r.table.entries) CHECK(e.protocol.tau == 0.0);
  CHECK(r.rows[3].protocol == r.rows[4].protocol);
  CHECK(r.rows[3].outcome.J == r.rows[4].outcome.J);
  CHECK(r.infeasible.empty());
}
