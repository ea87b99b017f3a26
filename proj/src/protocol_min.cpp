#include "tfc/protocol_min.hpp"

#include <cmath>

#include "tfc/errors.hpp"
#include "tfc/format.hpp"

namespace tfc {

bool MinimalSet::valid() const {
  if (protocols.empty() || protocols.front().lo != 0.0) return false;
  for (std::size_t i = 0; i < protocols.size(); ++i) {
    if (!(protocols[i].hi > protocols[i].lo)) return false;
    if (i > 0 && protocols[i].lo != protocols[i - 1].hi) return false;
  }
  return true;
}

MinimalSet minimal_cover(const ProtocolTable& table, const CoverConfig& cfg) {
  if (table.entries.empty()) throw CoverageGap("protocol-min", "minimal_cover", "empty protocol table");
  if (!(cfg.test_step > 0.0) || !(cfg.cover_max > 0.0)) {
    throw Error("protocol-min", "minimal_cover", "test_step and cover_max must be positive");
  }
  auto succeeds = [&](double speed, const Protocol& proto) {
    return evaluate_protocol(speed, proto, cfg.cost, cfg.region, cfg.trial).success;
  };
  // integer multiples keep the probe grid identical to the soundness grid
  const auto n_steps = static_cast<long>(std::floor(cfg.cover_max / cfg.test_step + 1e-9));
  auto speed_at = [&](long k) { return static_cast<double>(k) * cfg.test_step; };

  MinimalSet set;
  std::size_t current = 0;
  double lo = 0.0;
  for (long k = 1; k <= n_steps; ++k) {
    const double v = speed_at(k);
    if (succeeds(v, table.entries[current].protocol)) continue;

    std::optional<std::size_t> next;
    for (std::size_t j = table.entries.size(); j-- > 0;) {
      if (succeeds(v, table.entries[j].protocol)) {
        next = j;
        break;
      }
    }
    if (!next) {
      throw CoverageGap("protocol-min", "minimal_cover",
                        "no table protocol reaches the feedback region at theta_dot_0 = " + fmt9(v));
    }
    set.protocols.push_back({"", table.entries[current].protocol, lo, v, table.entries[current].theta_dot_0});
    current = *next;
    lo = v;
  }
  set.protocols.push_back(
      {"", table.entries[current].protocol, lo, cfg.cover_max, table.entries[current].theta_dot_0});
  for (std::size_t i = 0; i < set.protocols.size(); ++i) set.protocols[i].label = "U" + std::to_string(i + 1);
  return set;
}

const MinimalEntry& assign_protocol(double theta_dot_0, const MinimalSet& set) {
  if (set.protocols.empty() || theta_dot_0 < 0.0 || theta_dot_0 > set.cover_max() || !std::isfinite(theta_dot_0)) {
    throw OutOfRange("protocol-min", "assign_protocol",
                     "theta_dot_0 = " + fmt9(theta_dot_0) + " outside the covered range");
  }
  for (const auto& entry : set.protocols) {
    if (theta_dot_0 >= entry.lo && theta_dot_0 < entry.hi) return entry;
  }
  return set.protocols.back();
}

ProtocolSelector selector_for(const MinimalSet& set) {
  return [set](double speed) -> std::optional<Protocol> {
    try {
      return assign_protocol(speed, set).protocol;
    } catch (const OutOfRange&) {
      return std::nullopt;
    }
  };
}

}  // namespace tfc
