#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ridgeless/simulate.hpp"

namespace ridgeless {

inline constexpr double kDefaultInterpTol = 1e-8;

/// Conventional pseudoinverse cutoff max(b, d) * machine epsilon.
double default_rank_tol(Eigen::Index rows, Eigen::Index cols) noexcept;

/// Thin SVD of one shard X_m (b x d) with small singular values dropped.
///
/// Singular values below rank_tol * sigma_max are treated as zero, so the
/// kept factors give X^+ = V S^{-1} U^T and the row-space projector V V^T.
/// One code path covers b < d, b = d and b > d.
class ShardDecomposition {
 public:
  explicit ShardDecomposition(const Eigen::Ref<const Eigen::MatrixXd>& X,
                              std::optional<double> rank_tol = std::nullopt);

  Eigen::Index rows() const noexcept { return rows_; }
  Eigen::Index cols() const noexcept { return cols_; }
  Eigen::Index rank() const noexcept { return singular_values_.size(); }
  double sv_max() const noexcept { return sv_max_; }
  double sv_min_kept() const noexcept;

  /// X^+ y, the minimum-norm least-squares solution.
  Eigen::VectorXd solve(const Eigen::Ref<const Eigen::VectorXd>& y) const;
  /// X^+ X v and (I - X^+ X) v without forming d x d matrices.
  Eigen::VectorXd project_rowspace(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  Eigen::VectorXd project_nullspace(const Eigen::Ref<const Eigen::VectorXd>& v) const;

  Eigen::MatrixXd pseudoinverse() const;
  Eigen::MatrixXd rowspace_projector() const;
  Eigen::MatrixXd nullspace_projector() const;

  /// Tr[(X^+)^T Sigma X^+] = sum_j lambda_j ||row_j(X^+)||^2 for diagonal Sigma.
  double variance_trace(std::span<const double> lambda) const;

 private:
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  double sv_max_ = 0.0;
  Eigen::MatrixXd U_;  // b x r
  Eigen::MatrixXd V_;  // d x r
  Eigen::VectorXd singular_values_;
};

struct LocalFit {
  Eigen::VectorXd beta_hat;
  Eigen::Index numerical_rank = 0;
  double sv_max = 0.0;
  double sv_min_kept = 0.0;
  double residual_norm = 0.0;
  bool interpolates = false;
};

struct AveragedEstimator {
  Eigen::VectorXd beta_bar;
  std::size_t M = 0;
  std::vector<LocalFit> local_fits;
};

/// Local ridgeless fit beta_hat = X^+ Y with rank diagnostics. An all-zero X
/// yields the zero vector with rank 0. Non-finite input throws InputError.
LocalFit min_norm_fit(const Eigen::Ref<const Eigen::MatrixXd>& X,
                      const Eigen::Ref<const Eigen::VectorXd>& Y,
                      std::optional<double> rank_tol = std::nullopt,
                      double interp_tol = kDefaultInterpTol);

/// Same as above for a shard that has already been decomposed.
LocalFit min_norm_fit(const ShardDecomposition& shard,
                      const Eigen::Ref<const Eigen::MatrixXd>& X,
                      const Eigen::Ref<const Eigen::VectorXd>& Y,
                      double interp_tol = kDefaultInterpTol);

Eigen::MatrixXd rowspace_projector(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                   std::optional<double> rank_tol = std::nullopt);
Eigen::MatrixXd nullspace_projector(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                    std::optional<double> rank_tol = std::nullopt);

double variance_matrix_trace(const Eigen::Ref<const Eigen::MatrixXd>& X,
                             const Spectrum& spectrum,
                             std::optional<double> rank_tol = std::nullopt);

/// Uniform mean of the local solutions, summed in shard order.
AveragedEstimator average(std::vector<LocalFit> fits);
Eigen::VectorXd average(std::span<const Eigen::VectorXd> vectors);

/// Decomposes every shard of `plan`; shards are independent and run on up
/// to `threads` workers.
std::vector<ShardDecomposition> decompose_shards(const Eigen::MatrixXd& X,
                                                 const SplitPlan& plan,
                                                 std::optional<double> rank_tol = std::nullopt,
                                                 unsigned threads = 1);

/// Fits every shard and averages: the distributed ridgeless estimator.
AveragedEstimator fit_distributed(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                  const SplitPlan& plan,
                                  std::optional<double> rank_tol = std::nullopt,
                                  unsigned threads = 1);

}  // namespace ridgeless
