#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "ridgeless/config.hpp"
#include "ridgeless/table.hpp"

namespace ridgeless {

/// Train/test split of a headerless numeric CSV. Features and targets are
/// centered by the training means (the model has no intercept).
struct RealDataset {
  Eigen::MatrixXd X_train;
  Eigen::VectorXd y_train;
  Eigen::MatrixXd X_test;
  Eigen::VectorXd y_test;
  Eigen::VectorXd feature_mean;
  double target_mean = 0.0;

  std::size_t d() const noexcept { return static_cast<std::size_t>(X_train.cols()); }
  std::size_t n_train() const noexcept { return static_cast<std::size_t>(X_train.rows()); }
  std::size_t n_test() const noexcept { return static_cast<std::size_t>(X_test.rows()); }
};

/// First train_rows rows go to train, the rest to test. Throws DataError
/// naming the path (and line for malformed or ragged rows).
RealDataset ingest_csv(const std::filesystem::path& path, std::size_t target_column = 0,
                       std::size_t train_rows = kMsdTrainRows);

/// n distinct indices from [0, population) by a partial Fisher-Yates shuffle
/// driven by the (seed, rep) subsample stream.
std::vector<std::size_t> subsample_indices(std::size_t population, std::size_t n,
                                           std::uint64_t seed, std::uint32_t rep);

/// Test MSE of the M-machine average, indexed [rep][grid position].
struct RealDataRuns {
  std::vector<std::size_t> grid;
  std::vector<std::vector<double>> test_mse;
  std::vector<double> mean_test_mse() const;
};

RealDataRuns run_realdata(const RealDataset& data, std::size_t n_subsample,
                          const std::vector<std::size_t>& M_list, std::size_t reps,
                          std::uint64_t seed, unsigned threads = 1);

/// run_realdata driven by a config (ingests realdata.path) plus table rows.
struct RealDataResult {
  ResultTable table;
  RealDataRuns runs;
  std::size_t d = 0;
  std::size_t n_test = 0;
};
RealDataResult run_realdata(const ExperimentConfig& config);
RealDataResult run_realdata(const ExperimentConfig& config, const RealDataset& data);

}  // namespace ridgeless
