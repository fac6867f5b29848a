#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace bergman::experiments {

struct CheckLine {
  std::string text;
  bool pass = true;
};

struct ExperimentResult {
  std::string name;
  bool pass = true;
  std::vector<CheckLine> checks;
  nlohmann::json data;
  std::vector<std::pair<std::string, std::string>> files;  // name -> CSV body

  void add(bool ok, const std::string& text) {
    checks.push_back({text, ok});
    pass = pass && ok;
  }
};

// Named experiments, one per acceptance criterion. Parameters mirror the
// acceptance defaults; config fields override them.
ExperimentResult oracle_identity_suite();
ExperimentResult tinfty_limit();
ExperimentResult small_rho_cancellation();
ExperimentResult hciz_check(long n_mc = 1000000, uint64_t seed = 42);
ExperimentResult vandermonde_identity();
ExperimentResult sampler_crosscheck(long n = 10000, uint64_t seed = 42);
ExperimentResult one_point_flatness_check(long n = 10000, uint64_t seed = 42);
ExperimentResult two_point_vs_oracle(long n = 300000, uint64_t seed = 42);
ExperimentResult heat_meets_zeros(long n = 600000, uint64_t seed = 42);
ExperimentResult zeros_statistics(long n_var = 20000, long n_clt = 10000,
                                  long n_density = 1000, uint64_t seed = 42);
ExperimentResult boundary_degeneration(uint64_t seed = 42);
ExperimentResult concentration_check(long n = 1000, uint64_t seed = 42);

std::vector<std::string> experiment_names();

// dispatch on config["experiment"]; unknown names / malformed configs throw
ExperimentResult run_experiment(const nlohmann::json& config);

// process-wide manifest fields (versions, conventions, host, wall time)
nlohmann::json base_manifest(const std::string& command_line);

}  // namespace bergman::experiments
