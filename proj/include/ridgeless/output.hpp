#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ridgeless/config.hpp"
#include "ridgeless/table.hpp"

namespace ridgeless {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  ///< non-finite points are skipped
};

/// Static line chart with linear axes and a legend.
void write_svg(const std::filesystem::path& path, const std::string& title,
               const std::string& x_label, const std::string& y_label,
               const std::vector<PlotSeries>& series);

/// One series per distinct (n, d, F, rho2, eps, alpha, snr) of rows with `stat`,
/// x = M and y = value.
std::vector<PlotSeries> series_for_stat(const ResultTable& table, const std::string& stat,
                                        const std::string& label_prefix = "");

/// Strips a trailing ".csv" so that `--out a/b.csv` and `--out a/b` agree.
std::filesystem::path output_stem(const std::filesystem::path& out);

struct Provenance {
  std::string command;
  std::string config_canonical;
  std::string config_hash;
  std::string constants;
  unsigned threads = 1;
  double wall_seconds = 0.0;
};

std::string git_describe();

/// Writes <stem>.csv, <stem>.provenance.txt and, with plot set, <stem>.svg
/// (headline statistic vs M) and <stem>_bounds.svg when bound rows exist.
/// Returns the paths written.
std::vector<std::filesystem::path> emit_outputs(const ResultTable& table,
                                                const std::filesystem::path& out, bool plot,
                                                const Provenance& provenance);

}  // namespace ridgeless
