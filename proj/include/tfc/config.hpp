#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfc/cost.hpp"
#include "tfc/dp.hpp"
#include "tfc/geometry.hpp"
#include "tfc/online.hpp"
#include "tfc/optimize.hpp"
#include "tfc/pendulum.hpp"
#include "tfc/protocol_min.hpp"

namespace tfc {

enum class SimulateLaw { Feedback, Zero };

struct SimulateConfig {
  State s0{kPi, 0.001};
  double t_max = 5.0;
  SimulateLaw law = SimulateLaw::Feedback;
};

struct SweepConfig {
  double theta_dot_min = 0.05;
  double theta_dot_max = 5.0;
  double theta_dot_step = 0.05;
  std::vector<double> grid() const;
};

struct HybridConfig {
  // exit speed for the scenario; unset picks the middle of U2's interval
  std::optional<double> theta_dot_0;
  double t_max = 5.0;
};

struct DpRolloutConfig {
  State low_energy{0.0, 0.5};
  double boundary_theta_dot_0 = 4.0;
  double t_max = 30.0;
};

struct ExperimentConfig {
  PhysicalParams physical;
  CostParams cost;
  RegionConfig regions;  // physical and gains are kept in sync with the fields above
  FeedbackGains gains;
  double dt = 1.0e-3;
  TrialConfig trial;
  DpGrid dp;
  DpRolloutConfig dp_rollout;
  OfflineConfig offline;  // nm, hop and coarse-scan settings
  SweepConfig sweep;
  CoverConfig cover;
  OnlineConfig online;
  SimulateConfig simulate;
  HybridConfig hybrid;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency

  // Pushes shared fields (physical, gains, cost, dt, seed) into the
  // per-module configs. Call after editing any of them.
  void sync();
};

ExperimentConfig default_config();

// Strict parse: unknown keys and type mismatches raise ConfigError naming the
// dotted key path. Absent keys keep their defaults.
ExperimentConfig config_from_json(const nlohmann::json& j);
// "default" yields the defaults; otherwise a JSON file.
ExperimentConfig load_config(const std::string& path);
nlohmann::ordered_json to_json(const ExperimentConfig& cfg);

}  // namespace tfc
