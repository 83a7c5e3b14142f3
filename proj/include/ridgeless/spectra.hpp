#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ridgeless {

enum class SpectrumKind { PolynomialDecay, StrongWeak, Explicit };

/// Working dimension used for spectra with infinitely many eigenvalues.
inline constexpr std::size_t kDefaultTruncDim = 100'000;

/// Tail statistics at split index k (eigenvalues are 1-indexed, the tail is
/// j > k).
struct EffectiveRankReport {
  std::size_t k = 0;
  double r_k = 0.0;          ///< tail_sum / lambda_{k+1}
  double R_k = 0.0;          ///< tail_sum^2 / tail_sq_sum
  double tail_sum = 0.0;
  double tail_sq_sum = 0.0;
  double truncated_mass = 0.0;  ///< sum of eigenvalues beyond the working dimension
};

/// Effective dimension k*; std::nullopt stands for "infinite" (empty set).
using EffectiveDimension = std::optional<std::size_t>;

/// Eigenvalues of a diagonal covariance model, sorted non-increasing.
///
/// Immutable after construction. Suffix sums of lambda and lambda^2 are
/// precomputed once so that every effective rank is O(1).
class Spectrum {
 public:
  /// lambda_j = j^{-(1+eps)} for 1 <= j <= dim.
  static Spectrum polynomial_decay(double eps, std::size_t dim);
  /// Same law on an infinite index set, truncated at trunc_dim.
  static Spectrum polynomial_decay_infinite(double eps,
                                            std::size_t trunc_dim = kDefaultTruncDim);
  /// F eigenvalues equal to rho1 followed by dim - F equal to rho2.
  static Spectrum strong_weak(std::size_t num_strong, std::size_t dim, double rho2,
                              double rho1 = 1.0);
  static Spectrum explicit_values(std::vector<double> values);
  static Spectrum isotropic(std::size_t dim);
  /// One-column CSV of decreasing positive reals; '#' lines are skipped.
  static Spectrum load_explicit(const std::filesystem::path& path);

  SpectrumKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return values_.size(); }
  bool infinite() const noexcept { return infinite_; }
  double eps() const noexcept { return eps_; }
  std::size_t num_strong() const noexcept { return num_strong_; }
  double rho_strong() const noexcept { return rho1_; }
  double rho_weak() const noexcept { return rho2_; }

  std::span<const double> eigenvalues() const noexcept { return values_; }

  /// j-th largest eigenvalue, 1-indexed. Throws BoundsError outside [1, dim].
  double eigenvalue(std::size_t j) const;

  /// Tr[Sigma^{1+alpha}] over the working dimension.
  double weighted_trace(double alpha) const;
  double trace() const noexcept { return working_trace_; }

  /// Mass of the eigenvalues dropped by truncation (0 for finite spectra).
  /// Traces exclude it; effective ranks and k* of infinite spectra include it
  /// (and the matching tail of lambda^2), so they describe the full operator.
  double truncated_mass() const noexcept { return truncated_mass_; }

  EffectiveRankReport effective_rank_r(std::size_t k) const;
  EffectiveRankReport effective_rank_R(std::size_t k) const;

  /// Smallest k >= 0 with r_k >= a * n_local, by linear scan.
  EffectiveDimension effective_dimension(std::size_t n_local, double a = 2.0) const;

  /// Stable one-line description used for hashing and logs.
  std::string describe() const;

 private:
  Spectrum(SpectrumKind kind, std::vector<double> values, bool infinite);
  EffectiveRankReport report(std::size_t k) const;

  SpectrumKind kind_;
  std::vector<double> values_;
  std::vector<double> tail_sum_;     // tail_sum_[k] = sum_{j > k} lambda_j
  std::vector<double> tail_sq_sum_;  // same for lambda_j^2
  bool infinite_ = false;
  double eps_ = 0.0;
  std::size_t num_strong_ = 0;
  double rho1_ = 0.0;
  double rho2_ = 0.0;
  double truncated_mass_ = 0.0;
  double working_trace_ = 0.0;
};

std::string to_string(SpectrumKind kind);

}  // namespace ridgeless
