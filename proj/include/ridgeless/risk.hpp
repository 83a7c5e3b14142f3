#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ridgeless/estimator.hpp"
#include "ridgeless/simulate.hpp"
#include "ridgeless/spectra.hpp"

namespace ridgeless {

/// ||Sigma^{1/2}(beta - beta_star)||^2 for diagonal Sigma.
double excess_risk(const Eigen::Ref<const Eigen::VectorXd>& beta,
                   const Eigen::Ref<const Eigen::VectorXd>& beta_star,
                   const Spectrum& spectrum);

/// Exact E_eps bias ||Sigma^{1/2} (1/M) sum_m Pi_m beta*||^2 with the exact
/// nullspace projectors Pi_m of the realized shards.
double conditional_bias(std::span<const ShardDecomposition> shards,
                        const Eigen::Ref<const Eigen::VectorXd>& beta_star,
                        const Spectrum& spectrum);
double conditional_bias(std::span<const Eigen::MatrixXd> designs,
                        const Eigen::Ref<const Eigen::VectorXd>& beta_star,
                        const Spectrum& spectrum);

/// Exact E_eps variance (tau^2 / M^2) sum_m Tr[C_m] for Gaussian noise.
double conditional_variance(std::span<const ShardDecomposition> shards,
                            const Spectrum& spectrum, double tau);
double conditional_variance(std::span<const Eigen::MatrixXd> designs,
                            const Spectrum& spectrum, double tau);

/// Right-hand side of the classical almost-sure bias envelope
/// (1/M) sum_m |<beta*, (Sigma - Sigma_hat_m) beta*>| with
/// Sigma_hat_m = X_m^T X_m / b. This is NOT a valid upper bound on
/// conditional_bias in general; it is reported as a diagnostic.
double bias_envelope(std::span<const Eigen::MatrixXd> designs,
                     const Eigen::Ref<const Eigen::VectorXd>& beta_star,
                     const Spectrum& spectrum);

/// (8 tau^2 / M^2) sum_m Tr[C_m]; always dominates conditional_variance.
double variance_envelope(std::span<const ShardDecomposition> shards,
                         const Spectrum& spectrum, double tau);

/// Everything measurable on one realization split into M shards.
struct RealizationRisk {
  double excess_risk = 0.0;
  double cond_bias = 0.0;
  double cond_var = 0.0;
  Eigen::Index min_rank = 0;
  bool all_interpolate = true;
  bool bias_envelope_holds = true;
};

RealizationRisk evaluate_realization(const Dataset& data, const Spectrum& spectrum, double tau,
                                     const SplitPlan& plan,
                                     std::optional<double> rank_tol = std::nullopt,
                                     unsigned threads = 1);

enum class Resample { NoiseOnly, NoiseAndBeta, Full };

struct MonteCarloOptions {
  unsigned threads = 1;
  std::optional<double> rank_tol;
  SplitMode split_mode = SplitMode::Strict;
};

struct RiskReport {
  double excess_risk = 0.0;  ///< realized risk of replication 0
  double cond_bias = 0.0;    ///< exact for fixed designs; rep average otherwise
  double cond_var = 0.0;
  double cond_bias_stderr = 0.0;
  double cond_var_stderr = 0.0;
  double mc_mean = 0.0;
  double mc_stderr = 0.0;
  std::size_t reps = 0;
  bool designs_fixed = true;
  bool bias_envelope_holds = true;     ///< diagnostic only
  bool variance_envelope_holds = true; ///< always expected to be true
};

/// Monte-Carlo excess risk of the M-machine average. NoiseOnly and
/// NoiseAndBeta draw the design once (replication 0) and reuse it; Full
/// redraws everything per replication. Results are reduced in replication
/// order and do not depend on options.threads.
RiskReport monte_carlo_risk(const ModelConfig& config, std::size_t M, std::size_t reps,
                            Resample resample, const MonteCarloOptions& options = {});

/// Relative prediction efficiency risk_single / risk_M.
double efficiency(double risk_single, double risk_M);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Sample mean and standard error (sample sd / sqrt(count)); stderr is 0 for a
/// single value.
MeanStderr mean_stderr(std::span<const double> values);

}  // namespace ridgeless
