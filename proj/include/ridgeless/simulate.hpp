#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ridgeless/spectra.hpp"

namespace ridgeless {

/// Isotropic prior: coordinates of beta* are i.i.d. N(0, snr * tau^2 / d), so
/// that E||beta*||^2 / tau^2 = snr. With theta_ignores_tau the variance is the
/// literal snr / d.
struct RandomEffectsPrior {
  double snr = 0.0;
  bool theta_ignores_tau = false;
};

/// Named source functions Phi for the general source condition.
enum class SourceFunction { Easy, Isotropic, Hard };

/// beta* ~ N(0, (R2 / d) * Sigma^exponent), i.e. Phi(t) = t^exponent.
/// Hoelder source conditions use exponent = alpha; the named cases map to
/// exponents 1, 0 and -1.
struct SourcePrior {
  double exponent = 0.0;
  double R2 = 1.0;
};

struct FixedPrior {
  Eigen::VectorXd values;
};

using Prior = std::variant<RandomEffectsPrior, SourcePrior, FixedPrior>;

double source_exponent(SourceFunction phi) noexcept;
SourceFunction parse_source_function(const std::string& name);

struct ModelConfig {
  Spectrum spectrum;
  std::size_t n = 1;
  double noise_tau = 1.0;
  Prior prior = RandomEffectsPrior{};
  std::uint64_t seed = 0;

  std::size_t d() const noexcept { return spectrum.dim(); }
  /// Throws ParameterError when an invariant is violated.
  void validate() const;
};

/// Diagonal of Theta = E[beta* beta*^T] in the eigenbasis of Sigma.
Eigen::VectorXd theta_diagonal(const ModelConfig& config);

/// Tr[Sigma Theta].
double signal_trace(const ModelConfig& config);

struct Dataset {
  Eigen::MatrixXd X;  ///< n x d, rows in the eigenbasis of Sigma
  Eigen::VectorXd Y;
  Eigen::VectorXd beta_star;
  Eigen::VectorXd noise;  ///< Y - X beta*
};

/// Every sampler below draws from counter-based streams keyed by
/// (config.seed, rep, purpose, row), so a given row is identical no matter how
/// rows are later grouped into shards or how many threads are used.
Eigen::VectorXd sample_beta_star(const ModelConfig& config, std::uint32_t rep);
Eigen::MatrixXd sample_design(const ModelConfig& config, std::uint32_t rep,
                              unsigned threads = 1);
Eigen::VectorXd sample_noise(double tau, std::size_t n, std::uint64_t seed,
                             std::uint32_t rep);

Dataset make_dataset(const ModelConfig& config, std::uint32_t rep, unsigned threads = 1);

/// Same design, fresh noise (and optionally fresh beta*) drawn from `rep`.
void resample_targets(const ModelConfig& config, Dataset& data, std::uint32_t rep,
                      bool resample_beta);

enum class SplitMode { Strict, Truncate };

struct SplitPlan {
  std::size_t M = 1;
  std::size_t shard_size = 0;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;  ///< half-open [begin, end)
};

SplitPlan split(std::size_t n, std::size_t M, SplitMode mode = SplitMode::Strict);

/// All divisors of n in increasing order.
std::vector<std::size_t> divisors(std::size_t n);

/// Debug CSV dump: header "y,x1,...,xd".
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);
/// Reads X and Y back; beta_star and noise are left empty.
Dataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace ridgeless
