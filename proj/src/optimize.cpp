#include "tfc/optimize.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <ostream>

#include "tfc/errors.hpp"
#include "tfc/format.hpp"
#include "tfc/parallel.hpp"
#include "tfc/rng.hpp"

namespace tfc {

Point2 Box2::clamp(const Point2& x) const {
  return {std::clamp(x[0], lo[0], hi[0]), std::clamp(x[1], lo[1], hi[1])};
}

bool NmConfig::valid() const {
  return reflect > 0.0 && expand > 1.0 && expand > reflect && contract > 0.0 && contract < 1.0 &&
         shrink > 0.0 && shrink < 1.0 && max_iters > 0 && f_tol_rel >= 0.0 && f_tol_abs > 0.0 &&
         x_tol > 0.0 && initial_simplex_scale[0] > 0.0 && initial_simplex_scale[1] > 0.0;
}

NmResult nelder_mead(const Objective2& f, const Point2& x0, const NmConfig& cfg) {
  NmResult res;
  auto project = [&](const Point2& x) { return cfg.bounds ? cfg.bounds->clamp(x) : x; };
  auto eval = [&](const Point2& x) {
    ++res.evals;
    return f(x);
  };

  std::array<Point2, 3> v{project(x0), project({x0[0] + cfg.initial_simplex_scale[0], x0[1]}),
                          project({x0[0], x0[1] + cfg.initial_simplex_scale[1]})};
  // a clamped start on the upper bound collapses a vertex; step inward instead
  for (int d = 0; d < 2; ++d) {
    if (v[d + 1] == v[0]) v[d + 1][d] = v[0][d] - cfg.initial_simplex_scale[d];
    v[d + 1] = project(v[d + 1]);
  }
  std::array<double, 3> fv{eval(v[0]), eval(v[1]), eval(v[2])};

  auto order = [&] {
    std::array<int, 3> idx{0, 1, 2};
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const auto v_old = v;
    const auto f_old = fv;
    for (int k = 0; k < 3; ++k) {
      v[k] = v_old[idx[k]];
      fv[k] = f_old[idx[k]];
    }
  };
  auto along = [&](const Point2& base, const Point2& toward, double scale) {
    return project({base[0] + scale * (toward[0] - base[0]), base[1] + scale * (toward[1] - base[1])});
  };

  for (res.iters = 0; res.iters < cfg.max_iters; ++res.iters) {
    order();
    double diameter = 0.0;
    for (int k = 1; k < 3; ++k) diameter = std::max(diameter, std::hypot(v[k][0] - v[0][0], v[k][1] - v[0][1]));
    if (diameter < cfg.x_tol || fv[2] - fv[0] <= cfg.f_tol(fv[0])) break;

    const Point2 c{0.5 * (v[0][0] + v[1][0]), 0.5 * (v[0][1] + v[1][1])};
    const Point2 xr = along(c, v[2], -cfg.reflect);
    const double fr = eval(xr);
    if (fr < fv[0]) {
      const Point2 xe = along(c, v[2], -cfg.expand);
      const double fe = eval(xe);
      if (fe < fr) {
        v[2] = xe;
        fv[2] = fe;
      } else {
        v[2] = xr;
        fv[2] = fr;
      }
      continue;
    }
    if (fr < fv[1]) {
      v[2] = xr;
      fv[2] = fr;
      continue;
    }
    const bool outside = fr < fv[2];
    const Point2 xc = outside ? along(c, xr, cfg.contract) : along(c, v[2], cfg.contract);
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[2])) {
      v[2] = xc;
      fv[2] = fc;
      continue;
    }
    for (int k = 1; k < 3; ++k) {
      v[k] = along(v[0], v[k], cfg.shrink);
      fv[k] = eval(v[k]);
    }
  }
  order();
  res.x_best = v[0];
  res.f_best = fv[0];
  res.simplex = v;
  res.simplex_f = fv;
  return res;
}

HopResult basin_hop(const Objective2& f, const Point2& x0, const NmConfig& nm, const HopConfig& hop) {
  HopResult out;
  RandomStream rng(splitmix64(hop.rng_seed));
  Point2 start = x0;
  for (int h = 0; h < hop.n_hops; ++h) {
    if (h > 0) {
      start = {out.x_best[0] + hop.perturbation_scale[0] * (2.0 * rng.uniform() - 1.0),
               out.x_best[1] + hop.perturbation_scale[1] * (2.0 * rng.uniform() - 1.0)};
      if (nm.bounds) start = nm.bounds->clamp(start);
    }
    NmResult run = nelder_mead(f, start, nm);
    out.evals += run.evals;
    if (h == 0 || run.f_best < out.f_best - nm.f_tol(out.f_best)) {
      out.x_best = run.x_best;
      out.f_best = run.f_best;
    }
    out.runs.push_back(std::move(run));
  }
  return out;
}

OfflineConfig::OfflineConfig() { nm.bounds = Box2{}; }

namespace {

Protocol to_protocol(const Point2& x, double u_on) { return {x[0], x[1], u_on}; }

}  // namespace

OptimizedProtocol search_protocol(double theta_dot_0, const OfflineConfig& cfg) {
  const double u_on = -cfg.region.physical.u_max;
  int evals = 0;
  const Objective2 objective = [&](const Point2& x) {
    ++evals;
    return evaluate_protocol(theta_dot_0, to_protocol(x, u_on), cfg.cost, cfg.region, cfg.trial).J;
  };

  // coarse scan for a starting point inside the success region
  Point2 best{0.0, 0.0};
  double best_f = objective(best);
  const int n_t1 = static_cast<int>(std::llround(cfg.scan_t1_max / cfg.scan_step));
  const int n_tau = static_cast<int>(std::llround(cfg.scan_tau_max / cfg.scan_step));
  for (int j = 1; j <= n_tau; ++j) {
    for (int i = 0; i <= n_t1; ++i) {
      const Point2 x{i * cfg.scan_step, j * cfg.scan_step};
      const double fx = objective(x);
      if (fx < best_f) {
        best = x;
        best_f = fx;
      }
    }
  }

  HopConfig hop = cfg.hop;
  // seeded by the value, so repeated grid points reproduce exactly
  hop.rng_seed = RandomStream::for_module(cfg.hop.rng_seed, "offline-opt",
                                          std::bit_cast<std::uint64_t>(theta_dot_0))
                     .key();
  const HopResult hopped = basin_hop(objective, best, cfg.nm, hop);

  Point2 chosen = best;
  double chosen_f = best_f;
  if (hopped.f_best < best_f) {
    chosen = hopped.x_best;
    chosen_f = hopped.f_best;
  }
  // flat valley: among near-optimal simplex vertices take the smallest (tau, t1)
  const double tol = cfg.nm.f_tol(chosen_f);
  for (const auto& run : hopped.runs) {
    for (int k = 0; k < 3; ++k) {
      const auto& x = run.simplex[k];
      if (run.simplex_f[k] <= chosen_f + tol &&
          std::pair{x[1], x[0]} < std::pair{chosen[1], chosen[0]}) {
        chosen = x;
      }
    }
  }

  OptimizedProtocol out;
  out.theta_dot_0 = theta_dot_0;
  out.protocol = to_protocol(chosen, u_on);
  out.outcome = evaluate_protocol(theta_dot_0, out.protocol, cfg.cost, cfg.region, cfg.trial);

  const Protocol coast{0.0, 0.0, u_on};
  const TrialOutcome coast_outcome = evaluate_protocol(theta_dot_0, coast, cfg.cost, cfg.region, cfg.trial);
  if (coast_outcome.success && coast_outcome.J <= out.outcome.J + cfg.nm.f_tol(out.outcome.J)) {
    out.protocol = coast;
    out.outcome = coast_outcome;
  }
  out.evals = evals + 1;
  return out;
}

OptimizedProtocol optimize_protocol(double theta_dot_0, const OfflineConfig& cfg) {
  if (!(theta_dot_0 > 0.0)) {
    throw Error("offline-opt", "optimize_protocol", "theta_dot_0 must be positive");
  }
  OptimizedProtocol out = search_protocol(theta_dot_0, cfg);
  if (!out.outcome.success) {
    throw NoFeasibleProtocol("offline-opt", "optimize_protocol",
                             "no tested protocol reaches the feedback region at theta_dot_0 = " +
                                 fmt9(theta_dot_0));
  }
  return out;
}

SweepResult sweep(const std::vector<double>& theta_dot_grid, const OfflineConfig& cfg, int threads) {
  if (!std::is_sorted(theta_dot_grid.begin(), theta_dot_grid.end())) {
    throw Error("offline-opt", "sweep", "grid must be increasing");
  }
  SweepResult result;
  result.rows.resize(theta_dot_grid.size());
  parallel_for(theta_dot_grid.size(), threads,
               [&](std::size_t i) { result.rows[i] = search_protocol(theta_dot_grid[i], cfg); });
  for (const auto& row : result.rows) {
    if (!row.outcome.success) {
      result.infeasible.push_back(row.theta_dot_0);
      continue;
    }
    if (!result.table.entries.empty() && result.table.entries.back().theta_dot_0 == row.theta_dot_0) continue;
    result.table.entries.push_back({row.theta_dot_0, row.protocol, row.outcome.J});
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "theta_dot_0,t1,tau,cost,success\n";
  for (const auto& row : result.rows) {
    out << fmt9(row.theta_dot_0) << ',' << fmt9(row.protocol.t1) << ',' << fmt9(row.protocol.tau) << ','
        << fmt9(row.outcome.J) << ',' << (row.outcome.success ? 1 : 0) << '\n';
  }
}

}  // namespace tfc
