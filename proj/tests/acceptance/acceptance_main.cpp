#include <algorithm>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "tfc/acceptance.hpp"
#include "tfc/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string config = "default";
  std::vector<int> only;
  std::vector<int> known;
  int threads = 0;
  app.add_option("--config", config, "experiment config (JSON path or 'default')");
  app.add_option("--only", only, "criterion ids to run");
  app.add_option("--known-failure", known,
                 "criterion ids expected to fail; the exit status is 0 only if exactly these fail");
  app.add_option("--threads", threads, "worker threads, 0 = all cores");
  CLI11_PARSE(app, argc, argv);

  tfc::ExperimentConfig cfg;
  try {
    cfg = tfc::load_config(config);
  } catch (const tfc::Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  if (threads > 0) cfg.threads = threads;

  const auto results = tfc::run_acceptance(cfg, only, [](const tfc::CriterionResult& r) {
    std::cout << tfc::format_result(r) << std::endl;
  });

  std::set<int> failed;
  for (const auto& r : results) {
    if (!r.pass) failed.insert(r.id);
  }
  std::set<int> expected;
  for (int id : known) {
    if (std::any_of(results.begin(), results.end(), [&](const auto& r) { return r.id == id; })) expected.insert(id);
  }
  std::cout << results.size() - failed.size() << "/" << results.size() << " criteria passed";
  if (!failed.empty()) {
    std::cout << "; failed:";
    for (int id : failed) std::cout << " #" << id;
  }
  std::cout << '\n';
  if (failed != expected) {
    for (int id : expected) {
      if (!failed.count(id)) std::cout << "criterion #" << id << " was listed as a known failure but passed\n";
    }
    return 1;
  }
  return 0;
}
