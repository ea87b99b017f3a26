#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "tfc/control.hpp"
#include "tfc/cost.hpp"

namespace tfc {

using Point2 = std::array<double, 2>;
using Objective2 = std::function<double(const Point2&)>;

struct Box2 {
  Point2 lo{0.0, 0.0};
  Point2 hi{2.0, 2.0};

  Point2 clamp(const Point2& x) const;
};

struct NmConfig {
  Point2 initial_simplex_scale{0.1, 0.1};
  double reflect = 1.0;
  double expand = 2.0;
  double contract = 0.5;
  double shrink = 0.5;
  int max_iters = 500;
  double f_tol_rel = 1.0e-3;   // spread tolerance relative to |f_best|
  double f_tol_abs = 1.0e-12;
  double x_tol = 1.0e-5;       // simplex diameter
  std::optional<Box2> bounds;  // points are clamped into the box before evaluation

  bool valid() const;
  double f_tol(double f_best) const { return f_tol_rel * std::abs(f_best) + f_tol_abs; }
};

struct HopConfig {
  int n_hops = 8;
  Point2 perturbation_scale{0.15, 0.15};
  std::uint64_t rng_seed = 0;

  bool valid() const { return n_hops >= 1 && perturbation_scale[0] > 0.0 && perturbation_scale[1] > 0.0; }
};

struct NmResult {
  Point2 x_best{};
  double f_best = 0.0;
  int evals = 0;
  int iters = 0;
  // Final simplex, sorted by f; used for tie-breaking inside flat valleys.
  std::array<Point2, 3> simplex{};
  std::array<double, 3> simplex_f{};
};

// Nelder-Mead on two variables. Always returns the best point seen.
NmResult nelder_mead(const Objective2& f, const Point2& x0, const NmConfig& cfg);

struct HopResult {
  Point2 x_best{};
  double f_best = 0.0;
  int evals = 0;
  std::vector<NmResult> runs;  // one per hop, in order
};

// Basin hopping: hop 1 starts at x0, later hops start from the incumbent
// perturbed by uniform noise in +-perturbation_scale. A hop replaces the
// incumbent only if it is better by more than the f tolerance.
HopResult basin_hop(const Objective2& f, const Point2& x0, const NmConfig& nm, const HopConfig& hop);

// Everything the offline protocol search needs.
struct OfflineConfig {
  CostParams cost;
  RegionConfig region;
  TrialConfig trial;
  NmConfig nm;
  HopConfig hop;
  // coarse scan used to seed the search
  double scan_step = 0.05;
  double scan_t1_max = 1.0;
  double scan_tau_max = 1.5;

  OfflineConfig();
};

struct OptimizedProtocol {
  double theta_dot_0 = 0.0;
  Protocol protocol;
  TrialOutcome outcome;  // re-evaluated at the reported point
  int evals = 0;
};

// Best point found for theta_dot_0, feasible or not.
OptimizedProtocol search_protocol(double theta_dot_0, const OfflineConfig& cfg);

// Minimizes the trial cost over (t1, tau) in [0, 2]^2: coarse scan, then
// basin hopping from the best scan point. Returns (0, 0) when coasting
// succeeds and is within the f tolerance of the optimum. Throws
// NoFeasibleProtocol if no evaluated point reaches the feedback region.
OptimizedProtocol optimize_protocol(double theta_dot_0, const OfflineConfig& cfg);

struct SweepResult {
  ProtocolTable table;
  std::vector<OptimizedProtocol> rows;  // every grid point, grid order
  std::vector<double> infeasible;       // theta_dot_0 values with NoFeasibleProtocol
};

// optimize_protocol over an increasing grid; infeasible points are recorded
// and left out of the table. Duplicate grid values give identical rows but only
// one table entry.
SweepResult sweep(const std::vector<double>& theta_dot_grid, const OfflineConfig& cfg, int threads = 1);

// theta_dot_0,t1,tau,cost,success
void write_sweep_csv(std::ostream& out, const SweepResult& result);

}  // namespace tfc
