#pragma once

#include "rflogit/metrics.hpp"
#include "rflogit/pipeline.hpp"
#include "rflogit/simgen.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rflogit {

struct McConfig {
  int runs = 50;
  std::vector<double> contamination{0.0};
  std::vector<Method> methods{Method::fpca_ml, Method::rfpca_wby};
  std::uint64_t seed = 1;
  int threads = 1;
  SimConfig sim{};
  PipelineOptions pipeline{};  // method, num_basis and seed are set per fit
  Index imse_grid = 1001;
};

/// Outcome of one fit in one Monte-Carlo run.
struct RunRecord {
  Method method = Method::rfpca_wby;
  double contamination = 0.0;
  int run = 0;
  bool ok = false;
  std::string error;
  double imse = 0.0;
  double auc = 0.0;
  double seconds = 0.0;
  int num_basis = 0;
  Index num_components = 0;
  double orthonormality = 0.0;
  Index rejected = 0;  // observations given zero weight
};

struct McSummary {
  Method method = Method::rfpca_wby;
  double contamination = 0.0;
  Summary imse{};
  Summary auc{};
  double median_seconds = 0.0;
  int runs_ok = 0;
  int runs_failed = 0;
};

struct McResult {
  std::vector<RunRecord> runs;      // ordered by contamination, method, run
  std::vector<McSummary> summary;   // ordered by contamination, method
};

/// Generate, split, contaminate the training part, fit on it, and score the
/// held-out part, for every (run, contamination level, method). Each run draws
/// from its own stream, so results do not depend on the thread count.
McResult run_monte_carlo(const McConfig& cfg);

void write_summary_csv(std::ostream& out, const McResult& result);
void write_runs_csv(std::ostream& out, const McResult& result);
/// Wall-clock seconds per successful fit; kept apart so the other files are reproducible.
void write_timing_csv(std::ostream& out, const McResult& result);

}  // namespace rflogit
