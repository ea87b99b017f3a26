#include "tfc/experiments.hpp"

#include <sstream>

#include "tfc/errors.hpp"
#include "tfc/format.hpp"
#include "tfc/io.hpp"
#include "tfc/parallel.hpp"

namespace tfc {

namespace {

template <class Fn>
std::string render(Fn fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

int resolve_threads(const ExperimentConfig& cfg) { return cfg.threads > 0 ? cfg.threads : default_threads(); }

SimulateRun run_simulate(const ExperimentConfig& cfg) {
  const RegionConfig& region = cfg.regions;
  const SimulateConfig& sc = cfg.simulate;
  ControlLaw law;
  if (sc.law == SimulateLaw::Feedback) {
    law = [&](double, const State& s) {
      if (in_feedback_region(s, region)) return Command{feedback_torque(s, cfg.gains, cfg.physical), ControlMode::Feedback};
      return Command{0.0, ControlMode::Coast};
    };
  } else {
    law = [](double, const State&) { return Command{0.0, ControlMode::Coast}; };
  }
  SimulateRun run;
  run.trajectory = simulate(sc.s0, law, sc.t_max, cfg.dt, {}, cfg.physical);
  run.files.emplace_back("trajectory.csv",
                         render([&](std::ostream& o) { write_trajectory_csv(o, run.trajectory, cfg.physical); }));
  return run;
}

DpRun run_dp(const ExperimentConfig& cfg) {
  DpRun run;
  run.field = value_iteration(cfg.dp, cfg.cost, cfg.regions, resolve_threads(cfg));
  const DpRolloutConfig& rc = cfg.dp_rollout;
  run.low_energy = policy_rollout(rc.low_energy, run.field, rc.t_max, cfg.dt, cfg.cost, cfg.regions);
  const State edge{cfg.regions.center + cfg.regions.visible_half_width, rc.boundary_theta_dot_0};
  run.boundary = policy_rollout(edge, run.field, rc.t_max, cfg.dt, cfg.cost, cfg.regions);

  auto summary = [](const PolicyRollout& r) {
    return nlohmann::ordered_json{{"reached_goal", r.reached_goal},
                                  {"cost", round9(r.cost)},
                                  {"duration", round9(r.trajectory.duration())}};
  };
  nlohmann::ordered_json meta = policy_sidecar(run.field);
  meta["rollouts"] = {{"low_energy", summary(run.low_energy)}, {"boundary", summary(run.boundary)}};

  run.files.emplace_back("policy.csv", render([&](std::ostream& o) { write_policy_csv(o, run.field); }));
  run.files.emplace_back("policy.json", dump(meta));
  run.files.emplace_back("value.csv", render([&](std::ostream& o) {
                           const DpGrid& g = run.field.grid;
                           o << "theta,theta_dot,value,goal\n";
                           for (int i = 0; i < g.n_theta; ++i) {
                             for (int j = 0; j < g.n_theta_dot; ++j) {
                               o << fmt9(g.theta_at(i)) << ',' << fmt9(g.theta_dot_at(j)) << ','
                                 << fmt9(run.field.value_at(i, j)) << ','
                                 << int(run.field.goal_mask[g.index(i, j)]) << '\n';
                             }
                           }
                         }));
  run.files.emplace_back("rollout_low_energy.csv", render([&](std::ostream& o) {
                           write_trajectory_csv(o, run.low_energy.trajectory, cfg.physical);
                         }));
  run.files.emplace_back("rollout_boundary.csv", render([&](std::ostream& o) {
                           write_trajectory_csv(o, run.boundary.trajectory, cfg.physical);
                         }));
  return run;
}

SweepRun run_sweep(const ExperimentConfig& cfg) {
  SweepRun run;
  run.result = sweep(cfg.sweep.grid(), cfg.offline, resolve_threads(cfg));
  run.files.emplace_back("protocol_table.json", dump(to_json(run.result.table)));
  run.files.emplace_back("sweep.csv", render([&](std::ostream& o) { write_sweep_csv(o, run.result); }));
  return run;
}

MinimalSetRun run_minimal_set(const ExperimentConfig& cfg, const ProtocolTable& table) {
  MinimalSetRun run;
  run.set = minimal_cover(table, cfg.cover);
  run.files.emplace_back("minimal_set.json", dump(to_json(run.set)));
  return run;
}

HybridScenario run_hybrid_scenario(const ExperimentConfig& cfg, const MinimalSet& set) {
  HybridScenario sc;
  if (cfg.hybrid.theta_dot_0) {
    sc.theta_dot_0 = *cfg.hybrid.theta_dot_0;
  } else {
    if (set.protocols.size() < 2) {
      throw Error("cli-harness", "hybrid", "minimal set has no second protocol to pick a scenario speed from");
    }
    sc.theta_dot_0 = 0.5 * (set.protocols[1].lo + set.protocols[1].hi);
  }
  const State s0{cfg.regions.center + cfg.regions.visible_half_width, sc.theta_dot_0};
  sc.run = run_hybrid(s0, selector_for(set), cfg.hybrid.t_max, cfg.dt, cfg.regions, cfg.gains);

  nlohmann::ordered_json triggers = nlohmann::ordered_json::array();
  for (const auto& tr : sc.run.triggers) {
    triggers.push_back({{"t_cross", round9(tr.t_cross)},
                        {"theta_dot_0", round9(tr.theta_dot_0)},
                        {"direction", tr.direction == Direction::Positive ? "positive" : "negative"},
                        {"t1", round9(tr.protocol.t1)},
                        {"tau", round9(tr.protocol.tau)},
                        {"u_on", round9(tr.protocol.u_on)},
                        {"out_of_range", tr.out_of_range}});
  }
  sc.files.emplace_back("hybrid.csv", render([&](std::ostream& o) {
                          write_trajectory_csv(o, sc.run.trajectory, cfg.physical);
                        }));
  sc.files.emplace_back("hybrid_triggers.json",
                        dump({{"theta_dot_0", round9(sc.theta_dot_0)}, {"triggers", triggers}}));
  return sc;
}

OnlineRun run_online_experiment(const ExperimentConfig& cfg) {
  OnlineRun run;
  run.result = run_online(cfg.online, cfg.cost, cfg.regions);
  nlohmann::ordered_json table = to_json(run.result.table);
  table["missing_bins"] = run.result.missing_bins;
  run.files.emplace_back("cost_matrix.csv", render([&](std::ostream& o) {
                           write_cost_matrix_csv(o, run.result.matrix, cfg.online);
                         }));
  run.files.emplace_back("online_table.json", dump(table));
  run.files.emplace_back("online_log.jsonl",
                         render([&](std::ostream& o) { write_trial_log(o, run.result.trials); }));
  return run;
}

}  // namespace tfc
