#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "tfc/control.hpp"
#include "tfc/cost.hpp"
#include "tfc/geometry.hpp"

namespace tfc {

struct OnlineConfig {
  double bin_width = 0.4;
  int n_bins = 13;  // bins tile [0, n_bins * bin_width)
  std::vector<double> tau_values;
  std::vector<double> t1_values;
  long max_revolutions = 5000;
  double hysteresis = 0.2;      // J
  double pump_min_speed = 0.25;  // rad/s; no pumping below this
  double stall_timeout = 20.0;  // s without seeing the window
  double dt = 1.0e-3;
  std::uint64_t rng_seed = 0;

  // tau 0..0.6 and t1 0.2..0.6, both in 0.05 s steps
  OnlineConfig();
  bool valid() const;
  double bin_lo(int b) const { return b * bin_width; }
  double bin_center(int b) const { return (b + 0.5) * bin_width; }
  // -1 when the speed is outside the tiled range
  int bin_of(double speed) const;
};

struct CostCell {
  double J = 0.0;
  bool success = false;
  int visits = 0;
  double theta_dot_0 = 0.0;  // exit speed of the last visit
};

class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(int n_bins, int n_t1, int n_tau);

  CostCell& at(int bin, int t1, int tau) { return cells_[index(bin, t1, tau)]; }
  const CostCell& at(int bin, int t1, int tau) const { return cells_[index(bin, t1, tau)]; }
  int n_bins() const { return n_bins_; }
  int n_t1() const { return n_t1_; }
  int n_tau() const { return n_tau_; }
  long total_visits() const;

 private:
  std::size_t index(int bin, int t1, int tau) const {
    return (static_cast<std::size_t>(bin) * n_t1_ + t1) * n_tau_ + tau;
  }
  int n_bins_ = 0;
  int n_t1_ = 0;
  int n_tau_ = 0;
  std::vector<CostCell> cells_;
};

struct OnlineTrial {
  long index = 0;
  double t_start = 0.0;
  double theta_dot_0 = 0.0;
  int bin = 0;
  int t1_index = 0;
  int tau_index = 0;
  Protocol protocol;
  double J = 0.0;
  bool success = false;
  bool stalled = false;
  double t_end = 0.0;
};

struct OnlineResult {
  CostMatrix matrix;
  ProtocolTable table;
  std::vector<int> missing_bins;  // bins with no successful cell
  std::vector<OnlineTrial> trials;
  long revolutions = 0;
  double sim_time = 0.0;
  bool completed = false;  // every bin met the stopping rule
};

// Energy shaping used while exploring inside the window: push along the
// motion below the target, against it above target + hysteresis.
double pump_torque(const State& s, double target_energy, double hysteresis, const PhysicalParams& p);

// One continuous simulation without resets. Each positive exit from the window
// runs the next untested (t1, tau) cell of the exit speed's bin; tau is built
// up from zero row by row and a bin stops after the first row containing a
// success. Between trials the pendulum is pumped toward the lowest unfinished
// bin. Throws ExplorationStalled if the window is not seen for stall_timeout.
OnlineResult run_online(const OnlineConfig& cfg, const CostParams& cp, const RegionConfig& region);

struct BestProtocols {
  ProtocolTable table;  // entries at bin centers
  std::vector<int> missing_bins;
};

// Per bin, the successful cell with least J; ties go to smaller tau, then t1.
BestProtocols best_protocols(const CostMatrix& matrix, const OnlineConfig& cfg, double u_on);

// bin_lo,bin_hi,t1,tau,J,success,visits  (visited cells only)
void write_cost_matrix_csv(std::ostream& out, const CostMatrix& matrix, const OnlineConfig& cfg);
// one JSON object per trial
void write_trial_log(std::ostream& out, const std::vector<OnlineTrial>& trials);

}  // namespace tfc
