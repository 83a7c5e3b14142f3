#include "ridgeless/estimator.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "ridgeless/errors.hpp"
#include "ridgeless/parallel.hpp"

namespace ridgeless {
namespace {

void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& X, const char* what) {
  if (!X.allFinite()) throw InputError(std::string(what) + " contains non-finite entries");
}

}  // namespace

double default_rank_tol(Eigen::Index rows, Eigen::Index cols) noexcept {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
}

ShardDecomposition::ShardDecomposition(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                       std::optional<double> rank_tol)
    : rows_(X.rows()), cols_(X.cols()) {
  if (rows_ < 1 || cols_ < 1) throw InputError("shard must have at least one row and column");
  require_finite(X, "design matrix");
  const double tol = rank_tol.value_or(default_rank_tol(rows_, cols_));
  if (!(tol >= 0.0)) throw ParameterError("rank_tol must be >= 0");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  sv_max_ = s.size() > 0 ? s[0] : 0.0;
  Eigen::Index kept = 0;
  if (sv_max_ > 0.0) {
    const double cutoff = tol * sv_max_;
    while (kept < s.size() && s[kept] > cutoff) ++kept;
  }
  singular_values_ = s.head(kept);
  U_ = svd.matrixU().leftCols(kept);
  V_ = svd.matrixV().leftCols(kept);
}

double ShardDecomposition::sv_min_kept() const noexcept {
  return rank() > 0 ? singular_values_[rank() - 1] : 0.0;
}

Eigen::VectorXd ShardDecomposition::solve(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  if (y.size() != rows_) throw InputError("target length does not match shard rows");
  if (!y.allFinite()) throw InputError("targets contain non-finite entries");
  const Eigen::VectorXd coeffs = (U_.transpose() * y).cwiseQuotient(singular_values_);
  return V_ * coeffs;
}

Eigen::VectorXd ShardDecomposition::project_rowspace(
    const Eigen::Ref<const Eigen::VectorXd>& v) const {
  if (v.size() != cols_) throw InputError("vector length does not match shard columns");
  return V_ * (V_.transpose() * v);
}

Eigen::VectorXd ShardDecomposition::project_nullspace(
    const Eigen::Ref<const Eigen::VectorXd>& v) const {
  return v - project_rowspace(v);
}

Eigen::MatrixXd ShardDecomposition::pseudoinverse() const {
  return V_ * singular_values_.cwiseInverse().asDiagonal() * U_.transpose();
}

Eigen::MatrixXd ShardDecomposition::rowspace_projector() const { return V_ * V_.transpose(); }

Eigen::MatrixXd ShardDecomposition::nullspace_projector() const {
  Eigen::MatrixXd P = -rowspace_projector();
  P.diagonal().array() += 1.0;
  return P;
}

double ShardDecomposition::variance_trace(std::span<const double> lambda) const {
  if (static_cast<Eigen::Index>(lambda.size()) != cols_) {
    throw InputError("spectrum dimension does not match shard columns");
  }
  const Eigen::Map<const Eigen::VectorXd> lam(lambda.data(), cols_);
  // Column i of V contributes sum_j lambda_j V_ji^2 / s_i^2.
  const Eigen::VectorXd weighted = V_.array().square().matrix().transpose() * lam;
  return weighted.dot(singular_values_.array().square().inverse().matrix());
}

LocalFit min_norm_fit(const ShardDecomposition& shard,
                      const Eigen::Ref<const Eigen::MatrixXd>& X,
                      const Eigen::Ref<const Eigen::VectorXd>& Y, double interp_tol) {
  LocalFit fit;
  fit.beta_hat = shard.solve(Y);
  fit.numerical_rank = shard.rank();
  fit.sv_max = shard.sv_max();
  fit.sv_min_kept = shard.sv_min_kept();
  fit.residual_norm = (X * fit.beta_hat - Y).norm();
  fit.interpolates = fit.residual_norm <= interp_tol * Y.norm();
  return fit;
}

LocalFit min_norm_fit(const Eigen::Ref<const Eigen::MatrixXd>& X,
                      const Eigen::Ref<const Eigen::VectorXd>& Y,
                      std::optional<double> rank_tol, double interp_tol) {
  if (X.rows() != Y.size()) {
    throw InputError("X has " + std::to_string(X.rows()) + " rows but Y has " +
                     std::to_string(Y.size()) + " entries");
  }
  return min_norm_fit(ShardDecomposition(X, rank_tol), X, Y, interp_tol);
}

Eigen::MatrixXd rowspace_projector(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                   std::optional<double> rank_tol) {
  return ShardDecomposition(X, rank_tol).rowspace_projector();
}

Eigen::MatrixXd nullspace_projector(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                    std::optional<double> rank_tol) {
  return ShardDecomposition(X, rank_tol).nullspace_projector();
}

double variance_matrix_trace(const Eigen::Ref<const Eigen::MatrixXd>& X,
                             const Spectrum& spectrum, std::optional<double> rank_tol) {
  return ShardDecomposition(X, rank_tol).variance_trace(spectrum.eigenvalues());
}

Eigen::VectorXd average(std::span<const Eigen::VectorXd> vectors) {
  if (vectors.empty()) throw InputError("cannot average an empty list of fits");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(vectors.front().size());
  for (const auto& v : vectors) {
    if (v.size() != sum.size()) throw InputError("local fits have mismatched dimensions");
    sum += v;
  }
  return sum / static_cast<double>(vectors.size());
}

AveragedEstimator average(std::vector<LocalFit> fits) {
  std::vector<Eigen::VectorXd> betas;
  betas.reserve(fits.size());
  for (const auto& f : fits) betas.push_back(f.beta_hat);
  AveragedEstimator out;
  out.beta_bar = average(betas);
  out.M = fits.size();
  out.local_fits = std::move(fits);
  return out;
}

std::vector<ShardDecomposition> decompose_shards(const Eigen::MatrixXd& X,
                                                 const SplitPlan& plan,
                                                 std::optional<double> rank_tol,
                                                 unsigned threads) {
  std::vector<std::optional<ShardDecomposition>> slots(plan.M);
  parallel_for(plan.M, threads, [&](std::size_t m) {
    const auto [begin, end] = plan.ranges[m];
    slots[m].emplace(X.middleRows(static_cast<Eigen::Index>(begin),
                                  static_cast<Eigen::Index>(end - begin)),
                     rank_tol);
  });
  std::vector<ShardDecomposition> out;
  out.reserve(plan.M);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

AveragedEstimator fit_distributed(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                  const SplitPlan& plan, std::optional<double> rank_tol,
                                  unsigned threads) {
  if (X.rows() != Y.size()) throw InputError("X and Y row counts differ");
  std::vector<LocalFit> fits(plan.M);
  parallel_for(plan.M, threads, [&](std::size_t m) {
    const auto [begin, end] = plan.ranges[m];
    const auto b = static_cast<Eigen::Index>(end - begin);
    const auto start = static_cast<Eigen::Index>(begin);
    fits[m] = min_norm_fit(X.middleRows(start, b), Y.segment(start, b), rank_tol);
  });
  return average(std::move(fits));
}

}  // namespace ridgeless
