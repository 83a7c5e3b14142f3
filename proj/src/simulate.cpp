#include "ridgeless/simulate.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "ridgeless/errors.hpp"
#include "ridgeless/format.hpp"
#include "ridgeless/parallel.hpp"
#include "ridgeless/rng.hpp"

namespace ridgeless {

double source_exponent(SourceFunction phi) noexcept {
  switch (phi) {
    case SourceFunction::Easy: return 1.0;
    case SourceFunction::Isotropic: return 0.0;
    case SourceFunction::Hard: return -1.0;
  }
  return 0.0;
}

SourceFunction parse_source_function(const std::string& name) {
  if (name == "easy") return SourceFunction::Easy;
  if (name == "isotropic") return SourceFunction::Isotropic;
  if (name == "hard") return SourceFunction::Hard;
  throw ParameterError("unknown source function '" + name +
                       "' (expected easy, isotropic or hard)");
}

void ModelConfig::validate() const {
  if (n < 1) throw ParameterError("n must be >= 1");
  if (!(noise_tau >= 0.0) || !std::isfinite(noise_tau)) {
    throw ParameterError("noise tau must be finite and >= 0");
  }
  if (const auto* re = std::get_if<RandomEffectsPrior>(&prior)) {
    if (!(re->snr >= 0.0)) throw ParameterError("snr must be >= 0");
  } else if (const auto* src = std::get_if<SourcePrior>(&prior)) {
    if (!(src->R2 > 0.0)) throw ParameterError("R2 must be > 0");
    if (!std::isfinite(src->exponent)) throw ParameterError("source exponent must be finite");
  } else if (const auto* fixed = std::get_if<FixedPrior>(&prior)) {
    if (static_cast<std::size_t>(fixed->values.size()) != d()) {
      throw ParameterError("fixed beta* has length " + std::to_string(fixed->values.size()) +
                           " but d = " + std::to_string(d()));
    }
  }
}

Eigen::VectorXd theta_diagonal(const ModelConfig& config) {
  const std::size_t d = config.d();
  const auto lambda = config.spectrum.eigenvalues();
  Eigen::VectorXd theta(static_cast<Eigen::Index>(d));
  if (const auto* re = std::get_if<RandomEffectsPrior>(&config.prior)) {
    const double tau2 = re->theta_ignores_tau ? 1.0 : config.noise_tau * config.noise_tau;
    theta.setConstant(re->snr * tau2 / static_cast<double>(d));
  } else if (const auto* src = std::get_if<SourcePrior>(&config.prior)) {
    for (std::size_t j = 0; j < d; ++j) {
      theta[static_cast<Eigen::Index>(j)] =
          src->R2 / static_cast<double>(d) * std::pow(lambda[j], src->exponent);
    }
  } else {
    theta = std::get<FixedPrior>(config.prior).values.array().square();
  }
  return theta;
}

double signal_trace(const ModelConfig& config) {
  const Eigen::VectorXd theta = theta_diagonal(config);
  const auto lambda = config.spectrum.eigenvalues();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < theta.size(); ++j) sum += lambda[j] * theta[j];
  return sum;
}

Eigen::VectorXd sample_beta_star(const ModelConfig& config, std::uint32_t rep) {
  if (const auto* fixed = std::get_if<FixedPrior>(&config.prior)) return fixed->values;
  const Eigen::VectorXd sd = theta_diagonal(config).array().sqrt();
  const RandomStream stream(config.seed, rep, StreamPurpose::Beta, 0);
  Eigen::VectorXd beta(sd.size());
  for (Eigen::Index j = 0; j < sd.size(); ++j) {
    beta[j] = sd[j] * stream.normal(static_cast<std::uint64_t>(j));
  }
  return beta;
}

Eigen::MatrixXd sample_design(const ModelConfig& config, std::uint32_t rep, unsigned threads) {
  const auto n = static_cast<Eigen::Index>(config.n);
  const auto d = static_cast<Eigen::Index>(config.d());
  const auto lambda = config.spectrum.eigenvalues();
  Eigen::VectorXd scale(d);
  for (Eigen::Index j = 0; j < d; ++j) scale[j] = std::sqrt(lambda[j]);

  Eigen::MatrixXd X(n, d);
  parallel_for(config.n, threads, [&](std::size_t i) {
    const RandomStream stream(config.seed, rep, StreamPurpose::Design,
                              static_cast<std::uint32_t>(i));
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < d; ++j) {
      X(row, j) = scale[j] * stream.normal(static_cast<std::uint64_t>(j));
    }
  });
  return X;
}

Eigen::VectorXd sample_noise(double tau, std::size_t n, std::uint64_t seed, std::uint32_t rep) {
  if (!(tau >= 0.0)) throw ParameterError("noise tau must be >= 0");
  Eigen::VectorXd noise(static_cast<Eigen::Index>(n));
  const RandomStream stream(seed, rep, StreamPurpose::Noise, 0);
  for (std::size_t i = 0; i < n; ++i) {
    noise[static_cast<Eigen::Index>(i)] = tau * stream.normal(i);
  }
  return noise;
}

Dataset make_dataset(const ModelConfig& config, std::uint32_t rep, unsigned threads) {
  config.validate();
  Dataset data;
  data.X = sample_design(config, rep, threads);
  resample_targets(config, data, rep, true);
  return data;
}

void resample_targets(const ModelConfig& config, Dataset& data, std::uint32_t rep,
                      bool resample_beta) {
  if (resample_beta || data.beta_star.size() == 0) {
    data.beta_star = sample_beta_star(config, rep);
  }
  data.noise = sample_noise(config.noise_tau, config.n, config.seed, rep);
  data.Y = data.X * data.beta_star + data.noise;
}

SplitPlan split(std::size_t n, std::size_t M, SplitMode mode) {
  if (n == 0) throw ParameterError("split requires n >= 1");
  if (M == 0 || M > n) {
    throw ParameterError("split requires 1 <= M <= n (M=" + std::to_string(M) +
                         ", n=" + std::to_string(n) + ")");
  }
  if (mode == SplitMode::Strict && n % M != 0) {
    std::size_t suggested = M;
    while (n % suggested != 0) --suggested;
    throw DivisibilityError(n, M, suggested);
  }
  SplitPlan plan;
  plan.M = M;
  plan.shard_size = n / M;
  plan.ranges.reserve(M);
  for (std::size_t m = 0; m < M; ++m) {
    plan.ranges.emplace_back(m * plan.shard_size, (m + 1) * plan.shard_size);
  }
  return plan;
}

std::vector<std::size_t> divisors(std::size_t n) {
  std::vector<std::size_t> small, large;
  for (std::size_t k = 1; k * k <= n; ++k) {
    if (n % k == 0) {
      small.push_back(k);
      if (k != n / k) large.push_back(n / k);
    }
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write dataset file: " + path.string());
  out << "y";
  for (Eigen::Index j = 0; j < data.X.cols(); ++j) out << ",x" << (j + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
    out << format_double(data.Y[i]);
    for (Eigen::Index j = 0; j < data.X.cols(); ++j) out << ',' << format_double(data.X(i, j));
    out << '\n';
  }
  if (!out) throw DataError("failed writing dataset file: " + path.string());
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": missing header");
  const std::size_t cols = split_view(line, ',').size();
  if (cols < 2 || trim(split_view(line, ',')[0]) != "y") {
    throw DataError(path.string() + ":1: header must be y,x1,...,xd");
  }
  std::vector<double> values;
  std::size_t rows = 0, line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_view(line, ',');
    if (fields.size() != cols) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(cols) + " fields, got " + std::to_string(fields.size()));
    }
    for (auto f : fields) {
      const auto v = parse_double(f);
      if (!v) throw DataError(path.string() + ":" + std::to_string(line_no) + ": bad number");
      values.push_back(*v);
    }
    ++rows;
  }
  Dataset data;
  const auto n = static_cast<Eigen::Index>(rows);
  const auto d = static_cast<Eigen::Index>(cols - 1);
  data.X.resize(n, d);
  data.Y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.Y[i] = values[static_cast<std::size_t>(i) * cols];
    for (Eigen::Index j = 0; j < d; ++j) {
      data.X(i, j) = values[static_cast<std::size_t>(i) * cols + 1 + static_cast<std::size_t>(j)];
    }
  }
  return data;
}

}  // namespace ridgeless
