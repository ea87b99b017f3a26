#pragma once

#include <string>
#include <vector>

#include "tfc/control.hpp"
#include "tfc/cost.hpp"

namespace tfc {

struct MinimalEntry {
  std::string label;  // U1, U2, ...
  Protocol protocol;
  double lo = 0.0;    // validity [lo, hi); the last entry also owns hi
  double hi = 0.0;
  double source_theta_dot_0 = 0.0;  // table row the protocol came from
};

struct MinimalSet {
  std::vector<MinimalEntry> protocols;

  double cover_max() const { return protocols.empty() ? 0.0 : protocols.back().hi; }
  // contiguous, disjoint, starting at 0
  bool valid() const;
};

struct CoverConfig {
  double cover_max = 5.0;
  double test_step = 0.05;
  CostParams cost;
  RegionConfig region;
  TrialConfig trial;
};

// Greedy cover: the current protocol is extended upward one test step at a
// time until its trial fails; at the failing speed the table protocol with the
// highest theta_dot_0 that still succeeds there takes over. Throws CoverageGap
// if no table protocol succeeds at some failing speed.
MinimalSet minimal_cover(const ProtocolTable& table, const CoverConfig& cfg);

// Protocol whose validity interval contains theta_dot_0; boundaries belong to
// the higher interval. Throws OutOfRange outside [0, cover_max].
const MinimalEntry& assign_protocol(double theta_dot_0, const MinimalSet& set);

ProtocolSelector selector_for(const MinimalSet& set);

}  // namespace tfc
