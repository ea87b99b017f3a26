#include "tfc/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "tfc/errors.hpp"
#include "tfc/format.hpp"

namespace tfc {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<double> SweepConfig::grid() const {
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((theta_dot_max - theta_dot_min) / theta_dot_step + 1e-9));
  for (long k = 0; k <= n; ++k) out.push_back(std::stod(fmt9(theta_dot_min + k * theta_dot_step)));
  return out;
}

void ExperimentConfig::sync() {
  regions.physical = physical;
  regions.gains = gains;
  trial.dt = dt;
  online.dt = dt;
  offline.cost = cost;
  offline.region = regions;
  offline.trial = trial;
  offline.hop.rng_seed = seed;
  online.rng_seed = seed;
  cover.cost = cost;
  cover.region = regions;
  cover.trial = trial;
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.sync();
  return cfg;
}

namespace {

// Walks one JSON object, remembers which keys were read and rejects the rest.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(key(item.key()), "unknown key");
    }
  }
  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  const json* find(const std::string& k) {
    seen_.insert(k);
    auto it = j_.find(k);
    return it == j_.end() ? nullptr : &*it;
  }

  template <class Pred>
  void number(const std::string& k, double& out, Pred ok, const char* rule) {
    const json* v = find(k);
    if (!v) return;
    if (!v->is_number()) throw ConfigError(key(k), "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x) || !ok(x)) throw ConfigError(key(k), std::string("must be ") + rule);
    out = x;
  }
  void number(const std::string& k, double& out) {
    number(k, out, [](double) { return true; }, "finite");
  }

  template <class Int, class Pred>
  void integer(const std::string& k, Int& out, Pred ok, const char* rule) {
    const json* v = find(k);
    if (!v) return;
    if (!v->is_number_integer()) throw ConfigError(key(k), "expected an integer");
    if (v->is_number_unsigned()) {
      const auto x = v->get<std::uint64_t>();
      if (x > static_cast<std::uint64_t>(std::numeric_limits<Int>::max()) || !ok(static_cast<Int>(x))) {
        throw ConfigError(key(k), std::string("must be ") + rule);
      }
      out = static_cast<Int>(x);
      return;
    }
    const auto x = v->get<std::int64_t>();
    if (x < static_cast<std::int64_t>(std::numeric_limits<Int>::min()) || !ok(static_cast<Int>(x))) {
      throw ConfigError(key(k), std::string("must be ") + rule);
    }
    out = static_cast<Int>(x);
  }

  void pair(const std::string& k, Point2& out, bool positive) {
    const json* v = find(k);
    if (!v) return;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
      throw ConfigError(key(k), "expected an array of two numbers");
    }
    const Point2 x{(*v)[0].get<double>(), (*v)[1].get<double>()};
    if (positive && !(x[0] > 0.0 && x[1] > 0.0)) throw ConfigError(key(k), "entries must be positive");
    out = x;
  }

  void list(const std::string& k, std::vector<double>& out) {
    const json* v = find(k);
    if (!v) return;
    if (!v->is_array() || v->empty()) throw ConfigError(key(k), "expected a non-empty array of numbers");
    std::vector<double> xs;
    for (const auto& e : *v) {
      if (!e.is_number()) throw ConfigError(key(k), "expected a non-empty array of numbers");
      xs.push_back(e.get<double>());
    }
    out = std::move(xs);
  }

  void string(const std::string& k, std::string& out) {
    const json* v = find(k);
    if (!v) return;
    if (!v->is_string()) throw ConfigError(key(k), "expected a string");
    out = v->get<std::string>();
  }

  template <class Fn>
  void object(const std::string& k, Fn fn) {
    const json* v = find(k);
    if (!v) return;
    Section sub(*v, key(k));
    fn(sub);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

auto positive = [](auto x) { return x > 0; };
auto non_negative = [](auto x) { return x >= 0; };

void read_state(Section& s, State& out) {
  s.number("theta", out.theta);
  s.number("theta_dot", out.theta_dot);
}

bool increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  {
    Section root(j, "");
    root.object("physical", [&](Section& s) {
      s.number("m", cfg.physical.m, positive, "positive");
      s.number("l", cfg.physical.l, positive, "positive");
      s.number("g", cfg.physical.g, [](double g) { return g < 0.0; }, "negative (downward is stable)");
      s.number("u_max", cfg.physical.u_max, positive, "positive");
    });
    root.object("cost", [&](Section& s) {
      s.number("Q", cfg.cost.Q, positive, "positive");
      s.number("R", cfg.cost.R, positive, "positive");
      s.number("fail_penalty", cfg.cost.fail_penalty, non_negative, "non-negative");
    });
    root.object("regions", [&](Section& s) {
      s.number("visible_half_width", cfg.regions.visible_half_width,
               [](double w) { return w > 0.0 && w < kPi; }, "in (0, pi)");
      s.number("center", cfg.regions.center);
      std::string model{to_string(cfg.regions.model)};
      s.string("model", model);
      const auto parsed = region_model_from_string(model);
      if (!parsed) throw ConfigError(s.key("model"), "must be \"capture\" or \"saturation_band\"");
      cfg.regions.model = *parsed;
    });
    root.object("gains", [&](Section& s) {
      s.number("k1", cfg.gains.k1, positive, "positive");
      s.number("k2", cfg.gains.k2, positive, "positive");
    });
    root.number("dt", cfg.dt, positive, "positive");
    root.object("trial", [&](Section& s) { s.number("horizon", cfg.trial.horizon, positive, "positive"); });
    root.object("dp", [&](Section& s) {
      auto at_least_two = [](int n) { return n >= 2; };
      s.integer("n_theta", cfg.dp.n_theta, at_least_two, ">= 2");
      s.integer("n_theta_dot", cfg.dp.n_theta_dot, at_least_two, ">= 2");
      s.number("theta_dot_max", cfg.dp.theta_dot_max, positive, "positive");
      s.number("h", cfg.dp.h, positive, "positive");
      s.list("actions", cfg.dp.actions);
      if (cfg.dp.actions.size() > 255) throw ConfigError(s.key("actions"), "at most 255 actions");
      s.number("tol", cfg.dp.tol, positive, "positive");
      s.integer("max_iters", cfg.dp.max_iters, positive, "positive");
      s.object("rollout", [&](Section& r) {
        r.object("low_energy", [&](Section& st) { read_state(st, cfg.dp_rollout.low_energy); });
        r.number("boundary_theta_dot_0", cfg.dp_rollout.boundary_theta_dot_0, positive, "positive");
        r.number("t_max", cfg.dp_rollout.t_max, positive, "positive");
      });
    });
    root.object("nm", [&](Section& s) {
      NmConfig& nm = cfg.offline.nm;
      s.pair("initial_simplex_scale", nm.initial_simplex_scale, true);
      s.number("reflect", nm.reflect, positive, "positive");
      s.number("expand", nm.expand, [](double x) { return x > 1.0; }, "> 1");
      s.number("contract", nm.contract, [](double x) { return x > 0.0 && x < 1.0; }, "in (0, 1)");
      s.number("shrink", nm.shrink, [](double x) { return x > 0.0 && x < 1.0; }, "in (0, 1)");
      s.integer("max_iters", nm.max_iters, positive, "positive");
      s.number("f_tol_rel", nm.f_tol_rel, non_negative, "non-negative");
      s.number("f_tol_abs", nm.f_tol_abs, positive, "positive");
      s.number("x_tol", nm.x_tol, positive, "positive");
      s.object("bounds", [&](Section& b) {
        Box2 box = nm.bounds.value_or(Box2{});
        b.pair("lo", box.lo, false);
        b.pair("hi", box.hi, false);
        if (!(box.hi[0] > box.lo[0] && box.hi[1] > box.lo[1])) throw ConfigError(b.key("hi"), "must exceed lo");
        nm.bounds = box;
      });
      if (!nm.valid()) throw ConfigError("nm", "inconsistent Nelder-Mead coefficients");
    });
    root.object("hop", [&](Section& s) {
      s.integer("n_hops", cfg.offline.hop.n_hops, positive, "positive");
      s.pair("perturbation_scale", cfg.offline.hop.perturbation_scale, true);
    });
    root.object("sweep", [&](Section& s) {
      s.number("theta_dot_min", cfg.sweep.theta_dot_min, positive, "positive");
      s.number("theta_dot_max", cfg.sweep.theta_dot_max, positive, "positive");
      s.number("theta_dot_step", cfg.sweep.theta_dot_step, positive, "positive");
      if (cfg.sweep.theta_dot_max < cfg.sweep.theta_dot_min) {
        throw ConfigError(s.key("theta_dot_max"), "must be >= theta_dot_min");
      }
      s.number("scan_step", cfg.offline.scan_step, positive, "positive");
      s.number("scan_t1_max", cfg.offline.scan_t1_max, non_negative, "non-negative");
      s.number("scan_tau_max", cfg.offline.scan_tau_max, non_negative, "non-negative");
    });
    root.object("minimal_set", [&](Section& s) {
      s.number("cover_max", cfg.cover.cover_max, positive, "positive");
      s.number("test_step", cfg.cover.test_step, positive, "positive");
    });
    root.object("online", [&](Section& s) {
      OnlineConfig& o = cfg.online;
      s.number("bin_width", o.bin_width, positive, "positive");
      s.integer("n_bins", o.n_bins, positive, "positive");
      s.list("tau_values", o.tau_values);
      if (!increasing(o.tau_values) || o.tau_values.front() < 0.0) {
        throw ConfigError(s.key("tau_values"), "must be non-negative and increasing");
      }
      s.list("t1_values", o.t1_values);
      if (!increasing(o.t1_values) || o.t1_values.front() < 0.0) {
        throw ConfigError(s.key("t1_values"), "must be non-negative and increasing");
      }
      s.integer("max_revolutions", o.max_revolutions, positive, "positive");
      s.number("hysteresis", o.hysteresis, non_negative, "non-negative");
      s.number("pump_min_speed", o.pump_min_speed, non_negative, "non-negative");
      s.number("stall_timeout", o.stall_timeout, positive, "positive");
    });
    root.object("simulate", [&](Section& s) {
      s.object("initial_state", [&](Section& st) { read_state(st, cfg.simulate.s0); });
      s.number("t_max", cfg.simulate.t_max, positive, "positive");
      std::string law = cfg.simulate.law == SimulateLaw::Feedback ? "feedback" : "zero";
      s.string("law", law);
      if (law == "feedback") {
        cfg.simulate.law = SimulateLaw::Feedback;
      } else if (law == "zero") {
        cfg.simulate.law = SimulateLaw::Zero;
      } else {
        throw ConfigError(s.key("law"), "must be \"feedback\" or \"zero\"");
      }
    });
    root.object("hybrid", [&](Section& s) {
      if (const json* v = s.find("theta_dot_0"); v && !v->is_null()) {
        double x = 0.0;
        s.number("theta_dot_0", x, positive, "positive");
        cfg.hybrid.theta_dot_0 = x;
      }
      s.number("t_max", cfg.hybrid.t_max, positive, "positive");
    });
    root.string("output_dir", cfg.output_dir);
    root.integer("seed", cfg.seed, [](std::uint64_t) { return true; }, "an unsigned integer");
    root.integer("threads", cfg.threads, non_negative, "non-negative");
  }
  cfg.sync();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  if (path == "default") return default_config();
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

ordered_json to_json(const ExperimentConfig& cfg) {
  auto state = [](const State& s) { return ordered_json{{"theta", s.theta}, {"theta_dot", s.theta_dot}}; };
  auto pair = [](const Point2& p) { return ordered_json::array({p[0], p[1]}); };
  const NmConfig& nm = cfg.offline.nm;
  const Box2 box = nm.bounds.value_or(Box2{});

  ordered_json j;
  j["physical"] = {{"m", cfg.physical.m}, {"l", cfg.physical.l}, {"g", cfg.physical.g}, {"u_max", cfg.physical.u_max}};
  j["cost"] = {{"Q", cfg.cost.Q}, {"R", cfg.cost.R}, {"fail_penalty", cfg.cost.fail_penalty}};
  j["regions"] = {{"visible_half_width", cfg.regions.visible_half_width},
                  {"center", cfg.regions.center},
                  {"model", std::string(to_string(cfg.regions.model))}};
  j["gains"] = {{"k1", cfg.gains.k1}, {"k2", cfg.gains.k2}};
  j["dt"] = cfg.dt;
  j["trial"] = {{"horizon", cfg.trial.horizon}};
  j["dp"] = {{"n_theta", cfg.dp.n_theta},
             {"n_theta_dot", cfg.dp.n_theta_dot},
             {"theta_dot_max", cfg.dp.theta_dot_max},
             {"h", cfg.dp.h},
             {"actions", cfg.dp.actions},
             {"tol", cfg.dp.tol},
             {"max_iters", cfg.dp.max_iters},
             {"rollout",
              {{"low_energy", state(cfg.dp_rollout.low_energy)},
               {"boundary_theta_dot_0", cfg.dp_rollout.boundary_theta_dot_0},
               {"t_max", cfg.dp_rollout.t_max}}}};
  j["nm"] = {{"initial_simplex_scale", pair(nm.initial_simplex_scale)},
             {"reflect", nm.reflect},
             {"expand", nm.expand},
             {"contract", nm.contract},
             {"shrink", nm.shrink},
             {"max_iters", nm.max_iters},
             {"f_tol_rel", nm.f_tol_rel},
             {"f_tol_abs", nm.f_tol_abs},
             {"x_tol", nm.x_tol},
             {"bounds", {{"lo", pair(box.lo)}, {"hi", pair(box.hi)}}}};
  j["hop"] = {{"n_hops", cfg.offline.hop.n_hops}, {"perturbation_scale", pair(cfg.offline.hop.perturbation_scale)}};
  j["sweep"] = {{"theta_dot_min", cfg.sweep.theta_dot_min},
                {"theta_dot_max", cfg.sweep.theta_dot_max},
                {"theta_dot_step", cfg.sweep.theta_dot_step},
                {"scan_step", cfg.offline.scan_step},
                {"scan_t1_max", cfg.offline.scan_t1_max},
                {"scan_tau_max", cfg.offline.scan_tau_max}};
  j["minimal_set"] = {{"cover_max", cfg.cover.cover_max}, {"test_step", cfg.cover.test_step}};
  j["online"] = {{"bin_width", cfg.online.bin_width},
                 {"n_bins", cfg.online.n_bins},
                 {"tau_values", cfg.online.tau_values},
                 {"t1_values", cfg.online.t1_values},
                 {"max_revolutions", cfg.online.max_revolutions},
                 {"hysteresis", cfg.online.hysteresis},
                 {"pump_min_speed", cfg.online.pump_min_speed},
                 {"stall_timeout", cfg.online.stall_timeout}};
  j["simulate"] = {{"initial_state", state(cfg.simulate.s0)},
                   {"t_max", cfg.simulate.t_max},
                   {"law", cfg.simulate.law == SimulateLaw::Feedback ? "feedback" : "zero"}};
  j["hybrid"] = {{"theta_dot_0", cfg.hybrid.theta_dot_0 ? ordered_json(*cfg.hybrid.theta_dot_0) : ordered_json()},
                 {"t_max", cfg.hybrid.t_max}};
  j["output_dir"] = cfg.output_dir;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  return j;
}

}  // namespace tfc
