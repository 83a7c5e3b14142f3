#include "ridgeless/realdata.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "ridgeless/errors.hpp"
#include "ridgeless/estimator.hpp"
#include "ridgeless/experiment.hpp"
#include "ridgeless/format.hpp"
#include "ridgeless/parallel.hpp"
#include "ridgeless/risk.hpp"
#include "ridgeless/rng.hpp"
#include "ridgeless/simulate.hpp"

namespace ridgeless {
namespace {

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

}  // namespace

RealDataset ingest_csv(const std::filesystem::path& path, std::size_t target_column,
                       std::size_t train_rows) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open data file '" + path.string() + "'");
  if (train_rows == 0) throw DataError("train_rows must be >= 1");

  std::vector<double> values;
  std::size_t arity = 0;
  std::size_t rows = 0;
  std::size_t lineno = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_view(line, ',');
    if (arity == 0) {
      arity = fields.size();
      if (arity < 2) throw DataError(where(path, lineno) + "need a target and at least one feature");
      if (target_column >= arity) {
        throw DataError(where(path, lineno) + "target column " + std::to_string(target_column) +
                        " out of range for " + std::to_string(arity) + " columns");
      }
    } else if (fields.size() != arity) {
      throw DataError(where(path, lineno) + "schema error: expected " + std::to_string(arity) +
                      " fields, got " + std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const auto v = parse_double(trim(fields[j]));
      if (!v || !std::isfinite(*v)) {
        throw DataError(where(path, lineno) + "parse error in column " + std::to_string(j) +
                        ": '" + std::string(fields[j]) + "'");
      }
      values.push_back(*v);
    }
    ++rows;
  }
  if (rows == 0) throw DataError("data file '" + path.string() + "' is empty");
  if (train_rows > rows) {
    throw DataError("data file '" + path.string() + "' has " + std::to_string(rows) +
                    " rows, fewer than train_rows=" + std::to_string(train_rows));
  }

  const Eigen::Index d = static_cast<Eigen::Index>(arity - 1);
  const Eigen::Index n_train = static_cast<Eigen::Index>(train_rows);
  const Eigen::Index n_test = static_cast<Eigen::Index>(rows - train_rows);
  RealDataset out;
  out.X_train.resize(n_train, d);
  out.y_train.resize(n_train);
  out.X_test.resize(n_test, d);
  out.y_test.resize(n_test);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = values.data() + i * arity;
    const bool train = i < train_rows;
    const Eigen::Index r = static_cast<Eigen::Index>(train ? i : i - train_rows);
    Eigen::Index c = 0;
    for (std::size_t j = 0; j < arity; ++j) {
      if (j == target_column) {
        (train ? out.y_train : out.y_test)(r) = row[j];
      } else {
        (train ? out.X_train : out.X_test)(r, c++) = row[j];
      }
    }
  }
  values.clear();
  values.shrink_to_fit();

  out.feature_mean = out.X_train.colwise().mean().transpose();
  out.target_mean = out.y_train.mean();
  out.X_train.rowwise() -= out.feature_mean.transpose();
  out.X_test.rowwise() -= out.feature_mean.transpose();
  out.y_train.array() -= out.target_mean;
  out.y_test.array() -= out.target_mean;
  return out;
}

std::vector<std::size_t> subsample_indices(std::size_t population, std::size_t n,
                                           std::uint64_t seed, std::uint32_t rep) {
  if (n > population) {
    throw ParameterError("cannot draw " + std::to_string(n) + " rows from " +
                         std::to_string(population));
  }
  std::vector<std::size_t> perm(population);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  const RandomStream stream(seed, rep, StreamPurpose::Subsample, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t span = population - i;
    auto offset = static_cast<std::size_t>(stream.uniform(i) * static_cast<double>(span));
    if (offset >= span) offset = span - 1;
    std::swap(perm[i], perm[i + offset]);
  }
  perm.resize(n);
  return perm;
}

std::vector<double> RealDataRuns::mean_test_mse() const {
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    std::vector<double> col;
    for (const auto& r : test_mse) col.push_back(r[j]);
    out[j] = mean_stderr(col).mean;
  }
  return out;
}

RealDataRuns run_realdata(const RealDataset& data, std::size_t n_subsample,
                          const std::vector<std::size_t>& M_list, std::size_t reps,
                          std::uint64_t seed, unsigned threads) {
  if (n_subsample < 1 || n_subsample > data.n_train()) {
    throw ParameterError("n_subsample must lie in [1, " + std::to_string(data.n_train()) + "]");
  }
  if (data.n_test() == 0) throw DataError("real-data run needs a non-empty test set");
  if (reps < 1) throw ParameterError("reps must be >= 1");
  for (std::size_t M : M_list) (void)split(n_subsample, M);

  RealDataRuns runs;
  runs.grid = M_list;
  runs.test_mse.assign(reps, std::vector<double>(M_list.size()));
  const double n_test = static_cast<double>(data.n_test());
  parallel_for(reps, threads, [&](std::size_t r) {
    const auto rep = static_cast<std::uint32_t>(r);
    const std::vector<std::size_t> idx = subsample_indices(data.n_train(), n_subsample, seed, rep);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n_subsample), data.X_train.cols());
    Eigen::VectorXd Y(static_cast<Eigen::Index>(n_subsample));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const auto src = static_cast<Eigen::Index>(idx[i]);
      X.row(static_cast<Eigen::Index>(i)) = data.X_train.row(src);
      Y(static_cast<Eigen::Index>(i)) = data.y_train(src);
    }
    for (std::size_t j = 0; j < M_list.size(); ++j) {
      const AveragedEstimator est = fit_distributed(X, Y, split(n_subsample, M_list[j]));
      const Eigen::VectorXd resid = data.X_test * est.beta_bar - data.y_test;
      runs.test_mse[r][j] = resid.squaredNorm() / n_test;
    }
  });
  return runs;
}

RealDataResult run_realdata(const ExperimentConfig& config) {
  config.validate();
  if (config.realdata.path.empty()) throw ConfigError("realdata.path: no dataset path given");
  const RealDataset data =
      ingest_csv(config.realdata.path, config.realdata.target_column, config.realdata.train_rows);
  return run_realdata(config, data);
}

RealDataResult run_realdata(const ExperimentConfig& config, const RealDataset& data) {
  config.validate();
  const std::vector<SeriesSpec> all = config.series();
  RealDataResult out;
  out.d = data.d();
  out.n_test = data.n_test();
  SeriesSpec s = all.front();
  s.n = config.realdata.n_subsample;
  out.runs = run_realdata(data, s.n, s.grid, config.reps, config.seed, config.threads);

  const ResultRow base = base_row(config, s, out.d);
  for (std::size_t j = 0; j < s.grid.size(); ++j) {
    std::vector<double> col;
    for (const auto& r : out.runs.test_mse) col.push_back(r[j]);
    const MeanStderr ms = mean_stderr(col);
    ResultRow row = base;
    row.M = s.grid[j];
    row.rep_count = config.reps;
    row.stat = "test_mse";
    row.value = ms.mean;
    row.stderr_ = ms.stderr_;
    row.valid_flags = std::string("overparameterized=") + (s.n / s.grid[j] < out.d ? "1" : "0");
    out.table.push_back(std::move(row));
  }
  ResultRow best = base;
  best.rep_count = config.reps;
  best.stat = "m_opt_test_mse";
  best.value = static_cast<double>(argmin_on_grid(s.grid, out.runs.mean_test_mse()));
  out.table.push_back(std::move(best));
  return out;
}

}  // namespace ridgeless
