#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ridgeless/config.hpp"
#include "ridgeless/table.hpp"
#include "ridgeless/theory.hpp"

namespace ridgeless {

/// Per-rep measurements of one series, indexed [rep][grid position].
struct SeriesRuns {
  SeriesSpec spec;
  std::vector<std::vector<double>> risk;
  std::vector<std::vector<double>> cond_bias;
  std::vector<std::vector<double>> cond_var;
  std::vector<std::vector<bool>> interpolates;
  theory::TheoryCurve theory;

  std::vector<double> mean_cond_risk() const;
  std::vector<double> mean_risk() const;
  /// mean cond risk at M=1 divided by mean cond risk at each M.
  std::vector<double> efficiency() const;
};

struct SweepResult {
  ResultTable table;
  std::vector<SeriesRuns> series;
};

/// Simulated sweep. For every series and rep one dataset of size n is drawn
/// and split at every M of the grid, so curves over M share their designs.
/// The table does not depend on config.threads.
SweepResult run_sweep(const ExperimentConfig& config);

/// Theory-only rows (no sampling).
ResultTable run_theory(const ExperimentConfig& config);

/// Row prefilled with the series-level columns.
ResultRow base_row(const ExperimentConfig& config, const SeriesSpec& s, std::size_t d);

/// Grid entry maximizing `values` (first one on ties); 0 for an empty grid.
std::size_t argmax_on_grid(const std::vector<std::size_t>& grid, const std::vector<double>& values);
std::size_t argmin_on_grid(const std::vector<std::size_t>& grid, const std::vector<double>& values);

}  // namespace ridgeless
