#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tfc/config.hpp"
#include "tfc/control.hpp"
#include "tfc/dp.hpp"
#include "tfc/online.hpp"
#include "tfc/optimize.hpp"
#include "tfc/protocol_min.hpp"

namespace tfc {

// Named file contents, in the order they should be written.
using Artifacts = std::vector<std::pair<std::string, std::string>>;

int resolve_threads(const ExperimentConfig& cfg);

struct SimulateRun {
  Trajectory trajectory;
  Artifacts files;
};
SimulateRun run_simulate(const ExperimentConfig& cfg);

struct DpRun {
  PolicyField field;
  PolicyRollout low_energy;
  PolicyRollout boundary;
  Artifacts files;
};
DpRun run_dp(const ExperimentConfig& cfg);

struct SweepRun {
  SweepResult result;
  Artifacts files;
};
SweepRun run_sweep(const ExperimentConfig& cfg);

struct MinimalSetRun {
  MinimalSet set;
  Artifacts files;
};
MinimalSetRun run_minimal_set(const ExperimentConfig& cfg, const ProtocolTable& table);

struct HybridScenario {
  double theta_dot_0 = 0.0;
  HybridRun run;
  Artifacts files;
};
// Starts on the exit edge of the window at theta_dot_0 (by default the middle
// of U2's validity interval) and runs the hybrid controller.
HybridScenario run_hybrid_scenario(const ExperimentConfig& cfg, const MinimalSet& set);

struct OnlineRun {
  OnlineResult result;
  Artifacts files;
};
OnlineRun run_online_experiment(const ExperimentConfig& cfg);

}  // namespace tfc
