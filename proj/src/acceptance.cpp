#include "tfc/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include "tfc/control.hpp"
#include "tfc/cost.hpp"
#include "tfc/errors.hpp"
#include "tfc/experiments.hpp"
#include "tfc/format.hpp"
#include "tfc/parallel.hpp"
#include "tfc/rng.hpp"

namespace tfc {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// Results that several criteria share are computed once.
class Context {
 public:
  explicit Context(const ExperimentConfig& cfg) : cfg_(cfg), threads_(resolve_threads(cfg)) {}

  const ExperimentConfig& cfg() const { return cfg_; }
  int threads() const { return threads_; }

  const SweepRun& sweep() {
    if (!sweep_) sweep_ = run_sweep(cfg_);
    return *sweep_;
  }
  const MinimalSet& minimal_set() {
    if (!set_) set_ = minimal_cover(sweep().result.table, cfg_.cover);
    return *set_;
  }
  const DpRun& dp() {
    if (!dp_) dp_ = run_dp(cfg_);
    return *dp_;
  }
  const OnlineRun& online() {
    if (!online_) online_ = run_online_experiment(cfg_);
    return *online_;
  }
  // offline optimum at one speed, memoized by value
  const OptimizedProtocol& offline(double theta_dot_0) {
    auto it = offline_.find(theta_dot_0);
    if (it == offline_.end()) it = offline_.emplace(theta_dot_0, search_protocol(theta_dot_0, cfg_.offline)).first;
    return it->second;
  }
  void prefetch_offline(const std::vector<double>& speeds) {
    std::vector<double> todo;
    for (double v : speeds) {
      if (!offline_.count(v)) todo.push_back(v);
    }
    std::vector<OptimizedProtocol> rows(todo.size());
    parallel_for(todo.size(), threads_, [&](std::size_t i) { rows[i] = search_protocol(todo[i], cfg_.offline); });
    for (std::size_t i = 0; i < todo.size(); ++i) offline_.emplace(todo[i], rows[i]);
  }

 private:
  const ExperimentConfig& cfg_;
  int threads_;
  std::optional<SweepRun> sweep_;
  std::optional<MinimalSet> set_;
  std::optional<DpRun> dp_;
  std::optional<OnlineRun> online_;
  std::map<double, OptimizedProtocol> offline_;
};

struct Verdict {
  bool pass = false;
  std::string detail;
};

double grid_value(long k, double step) { return std::stod(fmt9(static_cast<double>(k) * step)); }

State exit_edge(const RegionConfig& region, double theta_dot_0) {
  return {region.center + region.visible_half_width, theta_dot_0};
}

Verdict energy_conservation(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const Trajectory traj = trial_trajectory(2.0, {0.0, 0.0, -cfg.physical.u_max}, cfg.regions, cfg.trial);
  const double e0 = total_energy(traj.samples.front().state, cfg.physical);
  double worst = 0.0;
  for (const auto& s : traj.samples) worst = std::max(worst, std::abs(total_energy(s.state, cfg.physical) - e0));
  const bool revolution = traj.event.has_value();
  // the event state is a linear interpolation between two samples, not an integrated state
  const double interp = revolution ? std::abs(total_energy(traj.event->state, cfg.physical) - e0) : 0.0;
  return {revolution && worst <= 1e-6,
          "max |dE| = " + fmt(worst) + " J over " + std::to_string(traj.samples.size()) +
              " integrated samples (limit 1e-06)" +
              (revolution ? "; interpolated re-entry point off by " + fmt(interp, 3) + " J" : ", re-entry not reached")};
}

Verdict work_energy(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const PhysicalParams& p = cfg.physical;
  RandomStream rng = RandomStream::for_module(cfg.seed, "acceptance", 2);
  constexpr int kSignals = 20;
  constexpr int kPieces = 10;
  constexpr long kStepsPerPiece = 200;
  double worst = 0.0;
  for (int n = 0; n < kSignals; ++n) {
    const State s0{rng.uniform(0.0, kTwoPi), rng.uniform(-3.0, 3.0)};
    std::vector<double> levels(kPieces);
    for (double& u : levels) u = rng.uniform(-p.u_max, p.u_max);
    long step = 0;
    const ControlLaw law = [&](double, const State&) {
      const double u = levels[static_cast<std::size_t>(std::min<long>(step / kStepsPerPiece, kPieces - 1))];
      ++step;
      return Command{u, ControlMode::FeedforwardOn};
    };
    const double t_end = kPieces * kStepsPerPiece * cfg.dt;
    const Trajectory traj = simulate(s0, law, t_end, cfg.dt, {}, p);
    const double work = delta_energy(traj, 0.0, traj.back().t);
    const double de = total_energy(traj.back().state, p) - total_energy(traj.samples.front().state, p);
    worst = std::max(worst, std::abs(work - de));
  }
  return {worst <= 1e-5, "max |W - dE| = " + fmt(worst) + " J over 20 signals (limit 1e-05)"};
}

Verdict gain_sanity(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const PhysicalParams& p = cfg.physical;
  const FeedbackGains k = default_gains();
  // trace / determinant of A - BK written out directly
  const double tr = -k.k2 / p.inertia();
  const double det = -(-p.g / p.l - k.k1 / p.inertia());
  const double disc = std::sqrt(tr * tr / 4.0 - det);
  const double oracle_hi = tr / 2.0 + disc;
  const double oracle_lo = tr / 2.0 - disc;
  const auto ev = closed_loop_eigenvalues(k, p);
  const double hi = std::max(ev[0].real(), ev[1].real());
  const double lo = std::min(ev[0].real(), ev[1].real());
  const double err = std::max({std::abs(hi - oracle_hi), std::abs(lo - oracle_lo), std::abs(ev[0].imag()),
                               std::abs(ev[1].imag())});
  const double quoted = std::max(std::abs(hi + 3.2307), std::abs(lo + 306.669));
  return {err <= 1e-3 && hi < 0.0 && lo < 0.0,
          "eigenvalues " + fmt(hi, 6) + ", " + fmt(lo, 7) + " (quadratic formula " + fmt(oracle_hi, 6) + ", " +
              fmt(oracle_lo, 7) + "), max error " + fmt(err, 3) + "; distance to -3.2307/-306.669 is " +
              fmt(quoted, 3)};
}

Verdict feedback_capture(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const RegionConfig& region = cfg.regions;
  const PhysicalParams& p = cfg.physical;
  const double w = region.visible_half_width;
  constexpr int kSide = 10;
  std::vector<State> starts;
  for (int a = 0; a < kSide; ++a) {
    for (int b = 0; b < kSide; ++b) {
      const double x = -w + 2.0 * w * (a + 0.5) / kSide;
      const double frac = -1.0 + 2.0 * (b + 0.5) / kSide;
      double theta_dot = 0.0;
      if (region.model == RegionModel::Capture) {
        theta_dot = frac * region.capture_half_width() - p.inverted_rate() * x;
      } else {
        theta_dot = (frac * p.u_max - cfg.gains.k1 * x) / cfg.gains.k2;
      }
      starts.push_back({region.center + x, theta_dot});
    }
  }
  std::vector<char> ok(starts.size(), 0);
  std::vector<double> final_err(starts.size(), 0.0);
  parallel_for(starts.size(), ctx.threads(), [&](std::size_t i) {
    bool stayed = true;
    const ControlLaw law = [&](double, const State& s) {
      stayed = stayed && in_visible(s, region);
      return Command{feedback_torque(s, cfg.gains, p), ControlMode::Feedback};
    };
    const Trajectory traj = simulate(starts[i], law, 5.0, cfg.dt, {}, p);
    const State& end = traj.back().state;
    final_err[i] = std::abs(wrap_to_pi(end.theta - region.center)) + std::abs(end.theta_dot);
    ok[i] = in_feedback_region(starts[i], region) && stayed && in_visible(end, region) && final_err[i] <= 1e-3;
  });
  const auto n_ok = std::count(ok.begin(), ok.end(), 1);
  const double worst = *std::max_element(final_err.begin(), final_err.end());
  return {n_ok == static_cast<long>(starts.size()),
          std::to_string(n_ok) + "/100 states converge inside the window; worst |x|+|theta_dot| at 5 s = " +
              fmt(worst, 3)};
}

Verdict no_control_threshold(Context& ctx) {
  const auto& cfg = ctx.cfg();
  std::vector<double> speeds;
  for (long k = 1; k <= 100; ++k) speeds.push_back(grid_value(k, 0.05));
  std::vector<char> ok(speeds.size(), 0);
  parallel_for(speeds.size(), ctx.threads(), [&](std::size_t i) {
    ok[i] = evaluate_protocol(speeds[i], {0.0, 0.0, -cfg.physical.u_max}, cfg.cost, cfg.regions, cfg.trial).success;
  });
  double largest = 0.0;
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    if (ok[i]) largest = speeds[i];
  }
  return {largest >= 1.4 && largest <= 2.2,
          "largest zero-control success at theta_dot_0 = " + fmt(largest) + " rad/s (band [1.4, 2.2])"};
}

// Number of adjacent-pair violations of monotonicity and the largest one.
std::pair<int, double> violations(const std::vector<double>& v, bool increasing) {
  int count = 0;
  double worst = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double d = increasing ? v[i - 1] - v[i] : v[i] - v[i - 1];
    if (d > 1e-9) {
      ++count;
      worst = std::max(worst, d);
    }
  }
  return {count, worst};
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (syy == 0.0 || sxx == 0.0) return 0.0;
  return sxy * sxy / (sxx * syy);
}

Verdict sweep_trends(Context& ctx) {
  std::vector<double> speeds;
  for (long k = 0; k <= 12; ++k) speeds.push_back(grid_value(8 + k, 0.25));
  ctx.prefetch_offline(speeds);
  std::vector<double> x, tau, t1;
  for (double v : speeds) {
    const auto& row = ctx.offline(v);
    if (!row.outcome.success) continue;
    x.push_back(v);
    tau.push_back(row.protocol.tau);
    t1.push_back(row.protocol.t1);
  }
  const auto [tau_count, tau_worst] = violations(tau, true);
  const auto [t1_count, t1_worst] = violations(t1, false);
  const double r2 = r_squared(x, tau);
  const bool pass = x.size() >= 2 && tau_count <= 1 && tau_worst <= 0.05 && t1_count <= 1 && t1_worst <= 0.05 &&
                    r2 >= 0.95;
  return {pass, std::to_string(x.size()) + " succeeding points; tau R^2 = " + fmt(r2) + ", tau decreases " +
                    std::to_string(tau_count) + " (max " + fmt(tau_worst, 3) + "), t1 increases " +
                    std::to_string(t1_count) + " (max " + fmt(t1_worst, 3) + ")"};
}

Verdict infeasibility_onset(Context& ctx) {
  std::vector<double> speeds;
  for (long k = 1; k <= 70; ++k) speeds.push_back(grid_value(k, 0.1));
  ctx.prefetch_offline(speeds);
  std::optional<double> first;
  for (double v : speeds) {
    if (!ctx.offline(v).outcome.success) {
      first = v;
      break;
    }
  }
  if (!first) return {false, "every theta_dot_0 up to 7.0 is feasible"};
  return {*first >= 5.5 && *first <= 6.7,
          "smallest infeasible theta_dot_0 = " + fmt(*first) + " rad/s (band [5.5, 6.7])"};
}

Verdict minimal_set(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const MinimalSet& set = ctx.minimal_set();
  const auto n_steps = static_cast<long>(std::floor(set.cover_max() / cfg.cover.test_step + 1e-9));
  std::vector<double> speeds;
  for (long k = 1; k <= n_steps; ++k) speeds.push_back(static_cast<double>(k) * cfg.cover.test_step);
  std::vector<char> ok(speeds.size(), 0);
  parallel_for(speeds.size(), ctx.threads(), [&](std::size_t i) {
    const Protocol& proto = assign_protocol(speeds[i], set).protocol;
    ok[i] = evaluate_protocol(speeds[i], proto, cfg.cost, cfg.regions, cfg.trial).success;
  });
  const auto n_ok = std::count(ok.begin(), ok.end(), 1);
  const std::size_t n = set.protocols.size();
  const bool lowest_coast = n > 0 && set.protocols.front().protocol.tau == 0.0;
  return {n >= 5 && n <= 8 && lowest_coast && n_ok == static_cast<long>(speeds.size()) && set.valid(),
          std::to_string(n) + " protocols over [0, " + fmt(set.cover_max()) + "], lowest tau = " +
              fmt(n > 0 ? set.protocols.front().protocol.tau : -1.0) + ", soundness " + std::to_string(n_ok) + "/" +
              std::to_string(speeds.size())};
}

Verdict hybrid_scenario(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const HybridScenario sc = run_hybrid_scenario(cfg, ctx.minimal_set());
  if (sc.run.triggers.empty()) return {false, "no decision-boundary crossing at theta_dot_0 = " + fmt(sc.theta_dot_0)};
  const Protocol& proto = sc.run.triggers.front().protocol;
  const double on = proto.t1;
  const double off = proto.t1 + proto.tau;
  const bool overlaps = proto.tau > 0.0 && on < 0.60 && off > 0.43;
  const double mid_err = std::abs(0.5 * (on + off) - 0.5 * (0.43 + 0.60));
  const State& end = sc.run.trajectory.back().state;
  const double err = std::abs(wrap_to_pi(end.theta - cfg.regions.center)) + std::abs(end.theta_dot);
  const bool captured =
      sc.run.trajectory.back().mode == ControlMode::Feedback && in_feedback_region(end, cfg.regions) && err <= 1e-3;
  return {overlaps && mid_err <= 0.1 && captured,
          "theta_dot_0 = " + fmt(sc.theta_dot_0) + ", window [" + fmt(on, 3) + ", " + fmt(off, 3) +
              "] s, midpoint error " + fmt(mid_err, 3) + " s, " +
              (captured ? "captured" : "not captured") + " (|x|+|theta_dot| = " + fmt(err, 3) + ")"};
}

Verdict dp_dominance(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const DpRun& dp = ctx.dp();
  const std::vector<double> speeds{2.0, 3.0, 4.0, 5.0};
  ctx.prefetch_offline(speeds);
  bool pass = dp.field.residual < 1e-6;
  std::ostringstream detail;
  detail << dp.field.iterations << " sweeps, residual " << fmt(dp.field.residual, 3) << ", slack "
         << fmt(dp.field.slack) << ";";
  for (double v : speeds) {
    const auto& off = ctx.offline(v);
    const PolicyRollout r = policy_rollout(exit_edge(cfg.regions, v), dp.field, cfg.dp_rollout.t_max, cfg.dt,
                                           cfg.cost, cfg.regions);
    const double bound = off.outcome.J * 1.05 + dp.field.slack;
    const bool ok = off.outcome.success && r.reached_goal && r.cost <= bound;
    pass = pass && ok;
    detail << ' ' << fmt(v, 2) << ": " << fmt(r.cost) << (ok ? " <= " : " > ") << fmt(bound);
  }
  return {pass, detail.str()};
}

Verdict dp_symmetry(Context& ctx) {
  const PolicyField& f = ctx.dp().field;
  const DpGrid& g = f.grid;
  double worst = 0.0;
  long mirrored = 0, total = 0;
  for (int i = 0; i < g.n_theta; ++i) {
    const int mi = (g.n_theta - i) % g.n_theta;
    for (int j = 0; j < g.n_theta_dot; ++j) {
      const int mj = g.n_theta_dot - 1 - j;
      worst = std::max(worst, std::abs(f.value_at(i, j) - f.value_at(mi, mj)));
      if (f.goal_mask[g.index(i, j)]) continue;
      ++total;
      if (g.mirrored_action(f.action_at(i, j)) == f.action_at(mi, mj)) ++mirrored;
    }
  }
  const double frac = total == 0 ? 0.0 : static_cast<double>(mirrored) / total;
  return {worst <= 1e-3 && frac >= 0.99,
          "max value asymmetry " + fmt(worst, 3) + ", mirrored actions " + std::to_string(mirrored) + "/" +
              std::to_string(total) + " (" + fmt(100.0 * frac, 6) + "%)"};
}

Verdict online_vs_offline(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const OnlineRun& run = ctx.online();
  const OnlineConfig& oc = cfg.online;
  std::vector<double> centers;
  for (int b = 0; b < oc.n_bins; ++b) centers.push_back(oc.bin_center(b));
  ctx.prefetch_offline(centers);
  int close = 0;
  std::string misses;
  for (int b = 0; b < oc.n_bins; ++b) {
    const double c = oc.bin_center(b);
    const auto it = std::find_if(run.result.table.entries.begin(), run.result.table.entries.end(),
                                 [&](const ProtocolEntry& e) { return std::abs(e.theta_dot_0 - c) < 1e-9; });
    const auto& off = ctx.offline(c);
    bool ok = false;
    if (it != run.result.table.entries.end() && off.outcome.success) {
      const Protocol& on = it->protocol;
      const bool tau_ok = std::abs(on.tau - off.protocol.tau) <= 0.05 + 1e-9;
      // t1 means nothing for a zero-length window
      const bool t1_ok = on.tau == 0.0 || off.protocol.tau == 0.0 || std::abs(on.t1 - off.protocol.t1) <= 0.05 + 1e-9;
      ok = tau_ok && t1_ok;
      if (!ok) {
        misses += " " + fmt(c, 2) + ":(" + fmt(on.t1, 2) + "," + fmt(on.tau, 2) + ")vs(" + fmt(off.protocol.t1, 2) +
                  "," + fmt(off.protocol.tau, 2) + ")";
      }
    } else {
      misses += " " + fmt(c, 2) + ":none";
    }
    close += ok;
  }
  const long trials = static_cast<long>(run.result.trials.size());
  const long full = static_cast<long>(oc.n_bins) * static_cast<long>(oc.t1_values.size() * oc.tau_values.size());
  const double frac = static_cast<double>(close) / oc.n_bins;
  return {frac >= 0.8 && trials < full,
          std::to_string(close) + "/" + std::to_string(oc.n_bins) + " bins within one grid step (need 80%), " +
              std::to_string(trials) + " trials < " + std::to_string(full) + (misses.empty() ? "" : "; misses" + misses)};
}

Verdict determinism(Context& ctx) {
  const auto& cfg = ctx.cfg();
  std::vector<std::string> diffs;
  auto compare = [&](const char* name, const Artifacts& a, const Artifacts& b) {
    if (a != b) diffs.push_back(name);
  };
  compare("sweep", ctx.sweep().files, run_sweep(cfg).files);
  compare("online", ctx.online().files, run_online_experiment(cfg).files);
  compare("dp", ctx.dp().files, run_dp(cfg).files);
  std::string which;
  for (const auto& d : diffs) which += " " + d;
  return {diffs.empty(), diffs.empty() ? "sweep, online and dp artifacts byte-identical across reruns"
                                       : "artifacts differ on rerun:" + which};
}

struct Criterion {
  int id;
  const char* title;
  Verdict (*fn)(Context&);
};

constexpr Criterion kCriteria[] = {
    {1, "energy conservation", energy_conservation},
    {2, "work-energy identity", work_energy},
    {3, "gain sanity", gain_sanity},
    {4, "feedback capture", feedback_capture},
    {5, "no-control threshold", no_control_threshold},
    {6, "offline sweep trends", sweep_trends},
    {7, "infeasibility onset", infeasibility_onset},
    {8, "minimal set", minimal_set},
    {9, "hybrid scenario", hybrid_scenario},
    {10, "dp dominance", dp_dominance},
    {11, "dp symmetry", dp_symmetry},
    {12, "online approximates offline", online_vs_offline},
    {13, "determinism", determinism},
};

}  // namespace

std::vector<CriterionResult> run_acceptance(const ExperimentConfig& cfg, const std::vector<int>& only,
                                            const std::function<void(const CriterionResult&)>& report) {
  Context ctx(cfg);
  std::vector<CriterionResult> results;
  for (const auto& c : kCriteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    CriterionResult r;
    r.id = c.id;
    r.title = c.title;
    const auto start = Clock::now();
    try {
      const Verdict v = c.fn(ctx);
      r.pass = v.pass;
      r.detail = v.detail;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (report) report(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_result(const CriterionResult& r) {
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.2f s", r.seconds);
  return std::string(r.pass ? "PASS" : "FAIL") + "  #" + std::to_string(r.id) + " " + r.title + ": " + r.detail +
         " [" + secs + "]";
}

}  // namespace tfc
