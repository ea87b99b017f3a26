#include "tfc/online.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "json.hpp"
#include "tfc/errors.hpp"
#include "tfc/format.hpp"
#include "tfc/rng.hpp"

namespace tfc {

namespace {

std::vector<double> steps(double lo, double hi, double step) {
  std::vector<double> out;
  const auto n = static_cast<int>(std::llround((hi - lo) / step));
  for (int k = 0; k <= n; ++k) out.push_back(lo + k * step);
  return out;
}

}  // namespace

OnlineConfig::OnlineConfig() : tau_values(steps(0.0, 0.6, 0.05)), t1_values(steps(0.2, 0.6, 0.05)) {}

bool OnlineConfig::valid() const {
  if (!(bin_width > 0.0) || n_bins < 1 || max_revolutions < 1 || !(dt > 0.0) || hysteresis < 0.0 ||
      !(stall_timeout > 0.0) || pump_min_speed < 0.0) {
    return false;
  }
  if (tau_values.empty() || t1_values.empty()) return false;
  auto increasing = [](const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
  };
  return increasing(tau_values) && increasing(t1_values) && tau_values.front() >= 0.0 && t1_values.front() >= 0.0;
}

int OnlineConfig::bin_of(double speed) const {
  if (!(speed >= 0.0)) return -1;
  const auto b = static_cast<long>(std::floor(speed / bin_width));
  return b < n_bins ? static_cast<int>(b) : -1;
}

CostMatrix::CostMatrix(int n_bins, int n_t1, int n_tau)
    : n_bins_(n_bins), n_t1_(n_t1), n_tau_(n_tau), cells_(static_cast<std::size_t>(n_bins) * n_t1 * n_tau) {}

long CostMatrix::total_visits() const {
  long n = 0;
  for (const auto& c : cells_) n += c.visits;
  return n;
}

double pump_torque(const State& s, double target_energy, double hysteresis, const PhysicalParams& p) {
  const double e = total_energy(s, p);
  const double dir = s.theta_dot > 0.0 ? 1.0 : (s.theta_dot < 0.0 ? -1.0 : 0.0);
  if (e < target_energy) return p.u_max * dir;
  if (e > target_energy + hysteresis) return -p.u_max * dir;
  return 0.0;
}

namespace {

// Per-bin build-up: tau rows in order; tau = 0 is a single cell since t1 has
// no effect without torque.
struct BinCursor {
  int tau = 0;
  int t1 = 0;
  bool row_success = false;
  bool done = false;
};

class Explorer {
 public:
  Explorer(const OnlineConfig& cfg) : cfg_(cfg), cursors_(static_cast<std::size_t>(cfg.n_bins)) {}

  bool done(int bin) const { return cursors_[bin].done; }
  bool all_done() const {
    return std::all_of(cursors_.begin(), cursors_.end(), [](const BinCursor& c) { return c.done; });
  }
  std::optional<int> lowest_open() const {
    for (int b = 0; b < cfg_.n_bins; ++b) {
      if (!cursors_[b].done) return b;
    }
    return std::nullopt;
  }
  std::pair<int, int> next_cell(int bin) const { return {cursors_[bin].t1, cursors_[bin].tau}; }

  void record(int bin, bool success) {
    BinCursor& c = cursors_[bin];
    c.row_success = c.row_success || success;
    const bool row_end = cfg_.tau_values[c.tau] == 0.0 || c.t1 + 1 >= static_cast<int>(cfg_.t1_values.size());
    if (!row_end) {
      ++c.t1;
      return;
    }
    if (c.row_success || c.tau + 1 >= static_cast<int>(cfg_.tau_values.size())) {
      c.done = true;
      return;
    }
    ++c.tau;
    c.t1 = 0;
  }

 private:
  const OnlineConfig& cfg_;
  std::vector<BinCursor> cursors_;
};

struct ActiveTrial {
  OnlineTrial record;
  double t_cross = 0.0;
  double theta_reentry = 0.0;  // unwrapped angle of the opposite window edge
  double quadrature = 0.0;
};

}  // namespace

OnlineResult run_online(const OnlineConfig& cfg, const CostParams& cp, const RegionConfig& region) {
  if (!cfg.valid()) throw Error("online-learn", "run_online", "invalid online config");
  const PhysicalParams& p = region.physical;
  const double w = region.visible_half_width;
  const double dt = cfg.dt;
  // energies at which the window edge is just reached and the top just passed
  const double e_window = -p.m * p.g * p.l * std::cos(w);
  const double e_top = target_energy(p);
  // while moving backwards, aim for a turning point inside the window
  const double e_turn = 0.5 * (e_window + e_top) - 0.5 * cfg.hysteresis;
  const double u_on = -p.u_max;

  OnlineResult result;
  result.matrix = CostMatrix(cfg.n_bins, static_cast<int>(cfg.t1_values.size()),
                             static_cast<int>(cfg.tau_values.size()));
  Explorer explorer(cfg);

  RandomStream rng = RandomStream::for_module(cfg.rng_seed, "online-learn");
  State s{region.center + rng.uniform(-0.5, 0.5) * w, 0.0};
  double t = 0.0;
  double last_visible = 0.0;
  bool recovering = false;
  std::optional<ActiveTrial> trial;

  auto finish = [&](ActiveTrial& a, bool success, bool stalled, double t_end) {
    a.record.success = success;
    a.record.stalled = stalled;
    a.record.J = a.quadrature + (success ? 0.0 : cp.fail_penalty);
    a.record.t_end = t_end;
    CostCell& cell = result.matrix.at(a.record.bin, a.record.t1_index, a.record.tau_index);
    cell.J = a.record.J;
    cell.success = success;
    cell.visits += 1;
    cell.theta_dot_0 = a.record.theta_dot_0;
    explorer.record(a.record.bin, success);
    result.trials.push_back(a.record);
  };

  while (result.revolutions < cfg.max_revolutions && !explorer.all_done()) {
    double u = 0.0;
    const bool visible = in_visible(s, region);
    if (trial) {
      u = protocol_step_torque(t - trial->t_cross, dt, trial->record.protocol);
    } else if (visible) {
      recovering = false;
      const auto target_bin = explorer.lowest_open();
      const double c = cfg.bin_center(target_bin.value_or(0));
      double target = 0.5 * p.inertia() * c * c + e_window;
      if (s.theta_dot < 0.0) target = std::min(target, e_turn);
      // from above, shift the band down so bleeding also stops at the target
      if (total_energy(s, p) > target) target -= cfg.hysteresis;
      // bang-bang bleeding can pin a slow pendulum inside the window; let it fall
      if (std::abs(s.theta_dot) >= cfg.pump_min_speed) u = pump_torque(s, target, cfg.hysteresis, p);
    } else {
      const double e = total_energy(s, p);
      if (e < e_window + 0.25 * cfg.hysteresis) recovering = true;
      if (recovering && e >= e_turn) recovering = false;
      if (recovering) u = s.theta_dot >= 0.0 ? p.u_max : -p.u_max;
    }

    const State next = step_rk4(s, u, dt, p);
    if (!next.finite()) throw NonFinite("online-learn", "run_online", "state diverged at t = " + fmt9(t));
    const double t_next = t + dt;

    if (trial) {
      ActiveTrial& a = *trial;
      const double c0 = stage_cost(s, u, cp, p);
      const double c1 = stage_cost(next, u, cp, p);
      if (next.theta >= a.theta_reentry) {
        const double frac = std::clamp((a.theta_reentry - s.theta) / (next.theta - s.theta), 0.0, 1.0);
        // the unwrapped angle has drifted far from the window; rebuild it on the edge exactly
        const State entry{region.center - w, s.theta_dot + frac * (next.theta_dot - s.theta_dot)};
        a.quadrature += 0.5 * (c0 + stage_cost(entry, u, cp, p)) * frac * dt;
        finish(a, in_feedback_region(entry, region), false, t + frac * dt);
        trial.reset();
      } else if (next.theta_dot <= 0.0) {
        const double frac = s.theta_dot == next.theta_dot ? 1.0 : s.theta_dot / (s.theta_dot - next.theta_dot);
        a.quadrature += 0.5 * (c0 + c1) * frac * dt;
        finish(a, false, true, t + frac * dt);
        trial.reset();
      } else {
        a.quadrature += 0.5 * (c0 + c1) * dt;
      }
    } else if (const auto crossing = detect_crossing(s, next, region);
               crossing && crossing->direction == Direction::Positive) {
      ++result.revolutions;
      const int bin = cfg.bin_of(crossing->theta_dot_0);
      if (bin >= 0 && !explorer.done(bin)) {
        const auto [i1, it] = explorer.next_cell(bin);
        ActiveTrial a;
        a.t_cross = t + crossing->t_cross * dt;
        a.theta_reentry = s.theta + (next.theta - s.theta) * crossing->t_cross + kTwoPi - 2.0 * w;
        a.record.index = static_cast<long>(result.trials.size());
        a.record.t_start = a.t_cross;
        a.record.theta_dot_0 = crossing->theta_dot_0;
        a.record.bin = bin;
        a.record.t1_index = i1;
        a.record.tau_index = it;
        a.record.protocol = {cfg.t1_values[i1], cfg.tau_values[it], u_on};
        // the remainder of this step is already trial time, under zero torque
        const State edge{next.theta - (next.theta - s.theta) * (1.0 - crossing->t_cross), crossing->theta_dot_0};
        a.quadrature = 0.5 * (stage_cost(edge, 0.0, cp, p) + stage_cost(next, 0.0, cp, p)) *
                       (1.0 - crossing->t_cross) * dt;
        trial = a;
      }
    }

    s = next;
    t = t_next;
    if (visible || in_visible(s, region) || trial) last_visible = t;
    if (t - last_visible > cfg.stall_timeout) {
      throw ExplorationStalled("online-learn", "run_online",
                               "window not reached for " + fmt9(cfg.stall_timeout) + " s at t = " + fmt9(t));
    }
  }

  result.sim_time = t;
  result.completed = explorer.all_done();
  const BestProtocols best = best_protocols(result.matrix, cfg, u_on);
  result.table = best.table;
  result.missing_bins = best.missing_bins;
  return result;
}

BestProtocols best_protocols(const CostMatrix& matrix, const OnlineConfig& cfg, double u_on) {
  BestProtocols out;
  for (int b = 0; b < matrix.n_bins(); ++b) {
    std::optional<std::pair<int, int>> best;  // (tau, t1)
    for (int it = 0; it < matrix.n_tau(); ++it) {
      for (int i1 = 0; i1 < matrix.n_t1(); ++i1) {
        const CostCell& c = matrix.at(b, i1, it);
        if (c.visits == 0 || !c.success) continue;
        // loops run in (tau, t1) order, so strict < keeps the tie-break
        if (!best || c.J < matrix.at(b, best->second, best->first).J) best = {it, i1};
      }
    }
    if (!best) {
      out.missing_bins.push_back(b);
      continue;
    }
    const CostCell& c = matrix.at(b, best->second, best->first);
    out.table.entries.push_back(
        {cfg.bin_center(b), {cfg.t1_values[best->second], cfg.tau_values[best->first], u_on}, c.J});
  }
  return out;
}

void write_cost_matrix_csv(std::ostream& out, const CostMatrix& matrix, const OnlineConfig& cfg) {
  out << "bin_lo,bin_hi,t1,tau,J,success,visits\n";
  for (int b = 0; b < matrix.n_bins(); ++b) {
    for (int it = 0; it < matrix.n_tau(); ++it) {
      for (int i1 = 0; i1 < matrix.n_t1(); ++i1) {
        const CostCell& c = matrix.at(b, i1, it);
        if (c.visits == 0) continue;
        out << fmt9(cfg.bin_lo(b)) << ',' << fmt9(cfg.bin_lo(b + 1)) << ',' << fmt9(cfg.t1_values[i1]) << ','
            << fmt9(cfg.tau_values[it]) << ',' << fmt9(c.J) << ',' << (c.success ? 1 : 0) << ',' << c.visits
            << '\n';
      }
    }
  }
}

void write_trial_log(std::ostream& out, const std::vector<OnlineTrial>& trials) {
  auto num = [](double v) { return std::stod(fmt9(v)); };
  for (const auto& tr : trials) {
    nlohmann::ordered_json j;
    j["trial"] = tr.index;
    j["t_start"] = num(tr.t_start);
    j["theta_dot_0"] = num(tr.theta_dot_0);
    j["bin"] = tr.bin;
    j["t1"] = num(tr.protocol.t1);
    j["tau"] = num(tr.protocol.tau);
    j["J"] = num(tr.J);
    j["success"] = tr.success;
    j["stalled"] = tr.stalled;
    j["t_end"] = num(tr.t_end);
    out << j.dump() << '\n';
  }
}

}  // namespace tfc
