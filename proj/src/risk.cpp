#include "ridgeless/risk.hpp"

#include <cmath>
#include <string>

#include "ridgeless/errors.hpp"
#include "ridgeless/parallel.hpp"

namespace ridgeless {
namespace {

Eigen::Map<const Eigen::VectorXd> lambda_of(const Spectrum& spectrum) {
  const auto lam = spectrum.eigenvalues();
  return {lam.data(), static_cast<Eigen::Index>(lam.size())};
}

std::vector<ShardDecomposition> decompose_all(std::span<const Eigen::MatrixXd> designs) {
  std::vector<ShardDecomposition> out;
  out.reserve(designs.size());
  for (const auto& X : designs) out.emplace_back(X);
  return out;
}

}  // namespace

double excess_risk(const Eigen::Ref<const Eigen::VectorXd>& beta,
                   const Eigen::Ref<const Eigen::VectorXd>& beta_star,
                   const Spectrum& spectrum) {
  const auto d = static_cast<Eigen::Index>(spectrum.dim());
  if (beta.size() != d || beta_star.size() != d) {
    throw InputError("excess_risk: vectors must have the spectrum dimension " +
                     std::to_string(d));
  }
  return (lambda_of(spectrum).array() * (beta - beta_star).array().square()).sum();
}

double conditional_bias(std::span<const ShardDecomposition> shards,
                        const Eigen::Ref<const Eigen::VectorXd>& beta_star,
                        const Spectrum& spectrum) {
  if (shards.empty()) throw InputError("conditional_bias needs at least one shard");
  Eigen::VectorXd mean_residual = Eigen::VectorXd::Zero(beta_star.size());
  for (const auto& shard : shards) {
    if (shard.cols() != beta_star.size()) throw InputError("shard/beta* dimension mismatch");
    mean_residual += shard.project_nullspace(beta_star);
  }
  mean_residual /= static_cast<double>(shards.size());
  return excess_risk(mean_residual, Eigen::VectorXd::Zero(beta_star.size()), spectrum);
}

double conditional_bias(std::span<const Eigen::MatrixXd> designs,
                        const Eigen::Ref<const Eigen::VectorXd>& beta_star,
                        const Spectrum& spectrum) {
  const auto shards = decompose_all(designs);
  return conditional_bias(shards, beta_star, spectrum);
}

double conditional_variance(std::span<const ShardDecomposition> shards,
                            const Spectrum& spectrum, double tau) {
  if (!(tau >= 0.0)) throw ParameterError("tau must be >= 0");
  if (shards.empty()) throw InputError("conditional_variance needs at least one shard");
  double trace_sum = 0.0;
  for (const auto& shard : shards) trace_sum += shard.variance_trace(spectrum.eigenvalues());
  const double M = static_cast<double>(shards.size());
  return tau * tau / (M * M) * trace_sum;
}

double conditional_variance(std::span<const Eigen::MatrixXd> designs,
                            const Spectrum& spectrum, double tau) {
  const auto shards = decompose_all(designs);
  return conditional_variance(shards, spectrum, tau);
}

double bias_envelope(std::span<const Eigen::MatrixXd> designs,
                     const Eigen::Ref<const Eigen::VectorXd>& beta_star,
                     const Spectrum& spectrum) {
  if (designs.empty()) throw InputError("bias_envelope needs at least one shard");
  const double population =
      excess_risk(beta_star, Eigen::VectorXd::Zero(beta_star.size()), spectrum);
  double sum = 0.0;
  for (const auto& X : designs) {
    const double empirical = (X * beta_star).squaredNorm() / static_cast<double>(X.rows());
    sum += std::abs(population - empirical);
  }
  return sum / static_cast<double>(designs.size());
}

double variance_envelope(std::span<const ShardDecomposition> shards, const Spectrum& spectrum,
                         double tau) {
  return 8.0 * conditional_variance(shards, spectrum, tau);
}

RealizationRisk evaluate_realization(const Dataset& data, const Spectrum& spectrum, double tau,
                                     const SplitPlan& plan, std::optional<double> rank_tol,
                                     unsigned threads) {
  const auto shards = decompose_shards(data.X, plan, rank_tol, threads);
  RealizationRisk out;
  std::vector<Eigen::VectorXd> betas;
  std::vector<Eigen::MatrixXd> blocks;
  betas.reserve(plan.M);
  blocks.reserve(plan.M);
  out.min_rank = shards.front().rank();
  for (std::size_t m = 0; m < plan.M; ++m) {
    const auto begin = static_cast<Eigen::Index>(plan.ranges[m].first);
    const auto b = static_cast<Eigen::Index>(plan.shard_size);
    const LocalFit fit =
        min_norm_fit(shards[m], data.X.middleRows(begin, b), data.Y.segment(begin, b));
    out.min_rank = std::min(out.min_rank, fit.numerical_rank);
    out.all_interpolate = out.all_interpolate && fit.interpolates;
    betas.push_back(fit.beta_hat);
    blocks.push_back(data.X.middleRows(begin, b));
  }
  out.excess_risk = excess_risk(average(betas), data.beta_star, spectrum);
  out.cond_bias = conditional_bias(shards, data.beta_star, spectrum);
  out.cond_var = conditional_variance(shards, spectrum, tau);
  out.bias_envelope_holds =
      out.cond_bias <= bias_envelope(blocks, data.beta_star, spectrum) * (1.0 + 1e-12);
  return out;
}

MeanStderr mean_stderr(std::span<const double> values) {
  MeanStderr out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    const double var = ss / static_cast<double>(values.size() - 1);
    out.stderr_ = std::sqrt(var / static_cast<double>(values.size()));
  }
  return out;
}

RiskReport monte_carlo_risk(const ModelConfig& config, std::size_t M, std::size_t reps,
                            Resample resample, const MonteCarloOptions& options) {
  if (reps < 1) throw ParameterError("reps must be >= 1");
  config.validate();
  const SplitPlan plan = split(config.n, M, options.split_mode);
  const Spectrum& spectrum = config.spectrum;
  const double tau = config.noise_tau;

  std::vector<double> risk(reps), bias(reps), var(reps);
  std::vector<char> bias_ok(reps, 1), var_ok(reps, 1);
  RiskReport report;
  report.reps = reps;
  report.designs_fixed = resample != Resample::Full;

  if (resample == Resample::Full) {
    parallel_for(reps, options.threads, [&](std::size_t r) {
      const Dataset data = make_dataset(config, static_cast<std::uint32_t>(r));
      const RealizationRisk rr = evaluate_realization(data, spectrum, tau, plan, options.rank_tol);
      risk[r] = rr.excess_risk;
      bias[r] = rr.cond_bias;
      var[r] = rr.cond_var;
      bias_ok[r] = rr.bias_envelope_holds;
    });
  } else {
    const Dataset base = make_dataset(config, 0, options.threads);
    const auto shards = decompose_shards(base.X, plan, options.rank_tol, options.threads);
    std::vector<Eigen::MatrixXd> blocks;
    for (const auto& [begin, end] : plan.ranges) {
      blocks.push_back(base.X.middleRows(static_cast<Eigen::Index>(begin),
                                         static_cast<Eigen::Index>(end - begin)));
    }
    const double fixed_var = conditional_variance(shards, spectrum, tau);
    const double fixed_bias = conditional_bias(shards, base.beta_star, spectrum);
    const bool fixed_bias_ok =
        fixed_bias <= bias_envelope(blocks, base.beta_star, spectrum) * (1.0 + 1e-12);
    parallel_for(reps, options.threads, [&](std::size_t r) {
      Dataset data;
      data.X = base.X;
      data.beta_star = base.beta_star;
      resample_targets(config, data, static_cast<std::uint32_t>(r),
                       resample == Resample::NoiseAndBeta && r > 0);
      std::vector<Eigen::VectorXd> betas;
      betas.reserve(plan.M);
      for (std::size_t m = 0; m < plan.M; ++m) {
        const auto begin = static_cast<Eigen::Index>(plan.ranges[m].first);
        betas.push_back(
            shards[m].solve(data.Y.segment(begin, static_cast<Eigen::Index>(plan.shard_size))));
      }
      risk[r] = excess_risk(average(betas), data.beta_star, spectrum);
      var[r] = fixed_var;
      if (resample == Resample::NoiseAndBeta && r > 0) {
        bias[r] = conditional_bias(shards, data.beta_star, spectrum);
        bias_ok[r] = bias[r] <= bias_envelope(blocks, data.beta_star, spectrum) * (1.0 + 1e-12);
      } else {
        bias[r] = fixed_bias;
        bias_ok[r] = fixed_bias_ok;
      }
    });
    report.variance_envelope_holds =
        fixed_var <= variance_envelope(shards, spectrum, tau) * (1.0 + 1e-12);
  }

  const MeanStderr mc = mean_stderr(risk);
  const MeanStderr b = mean_stderr(bias);
  const MeanStderr v = mean_stderr(var);
  report.excess_risk = risk.front();
  report.mc_mean = mc.mean;
  report.mc_stderr = mc.stderr_;
  report.cond_bias = b.mean;
  report.cond_bias_stderr = b.stderr_;
  report.cond_var = v.mean;
  report.cond_var_stderr = v.stderr_;
  for (std::size_t r = 0; r < reps; ++r) {
    report.bias_envelope_holds = report.bias_envelope_holds && bias_ok[r];
  }
  for (double x : {report.mc_mean, report.cond_bias, report.cond_var}) {
    if (!std::isfinite(x)) throw NumericError("monte_carlo_risk produced a non-finite value");
  }
  return report;
}

double efficiency(double risk_single, double risk_M) {
  if (!(risk_M > 0.0)) throw PreconditionError("efficiency is undefined for risk_M <= 0");
  return risk_single / risk_M;
}

}  // namespace ridgeless
