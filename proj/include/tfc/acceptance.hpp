#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tfc/config.hpp"

namespace tfc {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs the acceptance criteria (all of them when `only` is empty) and reports
// each result through `report` as soon as it is known.
std::vector<CriterionResult> run_acceptance(const ExperimentConfig& cfg, const std::vector<int>& only = {},
                                            const std::function<void(const CriterionResult&)>& report = {});

// "PASS  #3 gain sanity: ..." on one line
std::string format_result(const CriterionResult& r);

}  // namespace tfc
