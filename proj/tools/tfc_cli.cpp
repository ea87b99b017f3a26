// Command-line front end: one subcommand per experiment, artifacts and a
// manifest written into --out.

#include <cmath>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "tfc/acceptance.hpp"
#include "tfc/errors.hpp"
#include "tfc/experiments.hpp"
#include "tfc/io.hpp"

namespace {

struct Globals {
  std::string config = "default";
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  int threads = 0;
};

tfc::ExperimentConfig resolve(const Globals& g) {
  tfc::ExperimentConfig cfg = tfc::load_config(g.config);
  if (g.out) cfg.output_dir = *g.out;
  if (g.seed) cfg.seed = *g.seed;
  if (g.dt) {
    if (!(*g.dt > 0.0) || !std::isfinite(*g.dt)) throw tfc::ConfigError("dt", "must be positive");
    cfg.dt = *g.dt;
  }
  if (g.threads > 0) cfg.threads = g.threads;
  cfg.sync();
  return cfg;
}

void write_all(tfc::ArtifactWriter& w, const tfc::Artifacts& files) {
  for (const auto& [name, content] : files) w.write(name, content);
}

std::string command_line(int argc, char** argv) {
  std::string s = "tfc";
  for (int i = 1; i < argc; ++i) s += std::string(" ") + argv[i];
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"timed feedforward control of the pendulum"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Globals g;
  app.add_option("--config", g.config, "JSON config file, or 'default'");
  app.add_option("--out", g.out, "output directory (overrides output_dir)");
  app.add_option("--seed", g.seed, "run seed");
  app.add_option("--dt", g.dt, "integrator step in seconds");
  app.add_option("--threads", g.threads, "worker threads, 0 = all cores");

  auto* simulate = app.add_subcommand("simulate", "single rollout under feedback or zero torque");
  auto* dp = app.add_subcommand("dp", "value iteration on the state grid and two policy rollouts");
  auto* sweep = app.add_subcommand("sweep", "offline protocol optimization over exit speeds");
  auto* minimal = app.add_subcommand("minimal-set", "greedy minimal protocol cover from a protocol table");
  std::string table_path = "out/protocol_table.json";
  minimal->add_option("--table", table_path, "protocol table written by sweep");
  auto* hybrid = app.add_subcommand("hybrid", "feedback plus minimal-set feedforward from the window edge");
  std::string protocols_path = "out/minimal_set.json";
  hybrid->add_option("--protocols", protocols_path, "minimal set written by minimal-set");
  auto* online = app.add_subcommand("online", "online learning of the cost matrix");
  auto* validate = app.add_subcommand("validate", "run the acceptance suite");
  std::vector<int> known;
  validate->add_option("--known-failure", known, "criterion ids expected to fail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const tfc::ExperimentConfig cfg = resolve(g);
    tfc::ArtifactWriter w(cfg.output_dir);
    const std::string cmd = command_line(argc, argv);
    int status = 0;

    if (*simulate) {
      write_all(w, tfc::run_simulate(cfg).files);
    } else if (*dp) {
      const tfc::DpRun run = tfc::run_dp(cfg);
      write_all(w, run.files);
      std::cout << "dp: " << run.field.iterations << " sweeps, residual " << run.field.residual << "\n";
    } else if (*sweep) {
      const tfc::SweepRun run = tfc::run_sweep(cfg);
      write_all(w, run.files);
      std::cout << "sweep: " << run.result.table.entries.size() << " feasible, " << run.result.infeasible.size()
                << " infeasible\n";
      if (run.result.table.entries.empty()) {
        std::cerr << "error: offline-opt.sweep: no feasible protocol anywhere on the grid\n";
        status = 1;
      }
    } else if (*minimal) {
      const tfc::ProtocolTable table = tfc::protocol_table_from_json(tfc::read_json_file(table_path));
      const tfc::MinimalSetRun run = tfc::run_minimal_set(cfg, table);
      write_all(w, run.files);
      for (const auto& p : run.set.protocols) {
        std::cout << p.label << " [" << p.lo << ", " << p.hi << ") t1=" << p.protocol.t1 << " tau=" << p.protocol.tau
                  << "\n";
      }
    } else if (*hybrid) {
      const tfc::MinimalSet set = tfc::minimal_set_from_json(tfc::read_json_file(protocols_path));
      write_all(w, tfc::run_hybrid_scenario(cfg, set).files);
    } else if (*online) {
      const tfc::OnlineRun run = tfc::run_online_experiment(cfg);
      write_all(w, run.files);
      std::cout << "online: " << run.result.trials.size() << " trials, " << run.result.revolutions
                << " revolutions, " << run.result.missing_bins.size() << " bins without a success\n";
    } else if (*validate) {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      std::set<int> failed;
      tfc::run_acceptance(cfg, {}, [&](const tfc::CriterionResult& r) {
        std::cout << tfc::format_result(r) << std::endl;
        rows.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}});
        if (!r.pass) failed.insert(r.id);
      });
      w.write_json("acceptance.json", rows);
      if (failed != std::set<int>(known.begin(), known.end())) status = 1;
    }
    w.write_manifest(cmd, tfc::to_json(cfg));
    return status;
  } catch (const tfc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const tfc::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const tfc::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
