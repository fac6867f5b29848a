// Acceptance suite: one experiment per criterion, printed as pass/fail lines.
// Exit code 0 iff every criterion passes.

#include "bergman/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

using bergman::experiments::ExperimentResult;

int main() {
  setenv("OPENBLAS_NUM_THREADS", "1", 0);  // our own pool does the threading
  using clock = std::chrono::steady_clock;
  namespace ex = bergman::experiments;

  struct Criterion {
    int number;
    const char* title;
    std::function<ExperimentResult()> run;
  };

  const std::vector<Criterion> criteria = {
      {1, "oracle identity suite", [] { return ex::oracle_identity_suite(); }},
      {2, "t->infinity limit of the main formula", [] { return ex::tinfty_limit(); }},
      {3, "small-rho cancellation", [] { return ex::small_rho_cancellation(); }},
      {4, "HCIZ determinant vs Haar Monte Carlo", [] { return ex::hciz_check(); }},
      {5, "Gaussian-Vandermonde identity", [] { return ex::vandermonde_identity(); }},
      {6, "sampler cross-validation", [] { return ex::sampler_crosscheck(); }},
      {7, "one-point flatness", [] { return ex::one_point_flatness_check(); }},
      {8, "two-point covariance vs oracle", [] { return ex::two_point_vs_oracle(); }},
      {9, "heat kernel at large t meets random zeros", [] { return ex::heat_meets_zeros(); }},
      {10, "zeros ensemble statistics", [] { return ex::zeros_statistics(); }},
      {11, "boundary degeneration", [] { return ex::boundary_degeneration(); }},
      {12, "heat-kernel concentration", [] { return ex::concentration_check(); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    auto t0 = clock::now();
    ExperimentResult res;
    bool threw = false;
    std::string err;
    try {
      res = c.run();
    } catch (const std::exception& e) {
      threw = true;
      err = e.what();
    }
    double secs = std::chrono::duration<double>(clock::now() - t0).count();
    bool pass = !threw && res.pass;
    std::printf("[%s] criterion %d: %s (%.1f s)\n", pass ? "PASS" : "FAIL", c.number, c.title,
                secs);
    if (threw) {
      std::printf("       error: %s\n", err.c_str());
    } else {
      for (const auto& line : res.checks)
        std::printf("       [%s] %s\n", line.pass ? "pass" : "FAIL", line.text.c_str());
    }
    if (!pass) ++failed;
    std::fflush(stdout);
  }
  std::printf("SUMMARY: %zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
