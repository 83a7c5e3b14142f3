#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ridgeless/simulate.hpp"
#include "ridgeless/spectra.hpp"

namespace ridgeless::theory {

/// Universal constants of the bounds. Their values are unknown; they default
/// to 1 (a = 2, delta = 0.05) and every output records the vector used.
/// c, c_tilde and c_prime belong to the strong-weak bound and its optimal-M
/// formula.
struct TheoryConstants {
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
  double c4 = 1.0;
  double a = 2.0;
  double c_a = 1.0;
  double sigma_x = 1.0;
  double delta = 0.05;
  double c = 1.0;
  double c_tilde = 1.0;
  double c_prime = 1.0;

  void validate() const;
  /// "c1=1;c2=1;..." in a fixed order.
  std::string describe() const;
};

/// An optimal number of machines together with whether the inputs lie in the
/// regime where the formula was derived.
struct OptimalM {
  double m = 0.0;
  bool in_window = true;
};

// --- general bounds -------------------------------------------------------

/// (4 sigma_x / c1) log^{1/2}(2M/delta) Tr[Sigma Theta] sqrt(M/n).
double bias_bound_general(double trace_sigma_theta, double n, double M,
                          const TheoryConstants& k = {});
/// n/M >= log(2/delta) / c1.
bool bias_sample_condition(double n, double M, const TheoryConstants& k = {});

/// Shared bracket k*/n + (n/M^2) / R_{k*} with k* = k*_{n/M}. Throws
/// BoundUndefinedError when k* is infinite.
double variance_bracket(const Spectrum& spectrum, std::size_t n, std::size_t M, double a);

/// 8 c2 tau^2 * bracket.
double variance_bound_general(const Spectrum& spectrum, std::size_t n, std::size_t M,
                              double tau, const TheoryConstants& k = {});
/// k*_{n/M} <= n / (c2 M) (false when k* is infinite).
bool variance_k_condition(const Spectrum& spectrum, std::size_t n, std::size_t M,
                          const TheoryConstants& k = {});

/// c_a sigma^2 * bracket.
double lower_bound_general(const Spectrum& spectrum, std::size_t n, std::size_t M,
                           double sigma_noise, const TheoryConstants& k = {});

/// (tau_tilde^2 / M) min{d, b} / (max{d, b} + 1 - min{d, b}), b = n/M.
double universal_lower_bound(double d, double n, double M, double tau_tilde);

// --- polynomial decay -----------------------------------------------------

/// 1/alpha for alpha > 0, 1/eps for alpha = 0.
double c_alpha_n(double alpha, double eps);

struct TwoTerms {
  double bias = 0.0;
  double variance = 0.0;
  double total() const noexcept { return bias + variance; }
};

/// c3 sigma_x [log^{1/2}(2M/delta)] C_{alpha,n} sqrt(M/n) + c4 tau^2 eps / M.
TwoTerms poly_bound_terms(double alpha, double eps, double n, double M, double tau,
                          const TheoryConstants& k = {}, bool with_log = true);
double poly_total_bound(double alpha, double eps, double n, double M, double tau,
                        const TheoryConstants& k = {});

/// C (alpha eps sqrt n)^{2/3} (alpha > 0) or C (eps^2 sqrt n)^{2/3} (alpha = 0)
/// with C = (c4 tau^2 / (c3 sigma_x))^{2/3}; in_window reports
/// 1/sqrt(n) <= eps (resp. eps^2) <= n.
OptimalM optimal_m_poly(double alpha, double eps, double n, double tau,
                        const TheoryConstants& k = {});

// --- strong-weak features, random effects ---------------------------------

struct FiniteDimFlags {
  bool cond_F = true;       ///< a n/M < (1 - rho2) F + rho2 d
  bool weak_small = true;   ///< rho2 d <= F
};

FiniteDimFlags finite_dim_flags(double d, double F, double rho2, double n, double M,
                                const TheoryConstants& k = {});

/// c sigma_x (snr/d) F [log^{1/2}(2M/delta)] sqrt(M/n)
///   + c_tilde tau^2 (1 - rho2)^{-2} (n/M^2) / F.
TwoTerms finite_dim_bound_terms(double d, double F, double snr, double rho2, double n, double M,
                                double tau, const TheoryConstants& k = {}, bool with_log = true);
double finite_dim_total_bound(double d, double F, double snr, double rho2, double n, double M,
                              double tau, const TheoryConstants& k = {});

/// Coefficients of the log-free bound written as C1 sqrt(M) + C2 / M^2.
struct HCoefficients {
  double C1 = 0.0;
  double C2 = 0.0;
};
HCoefficients finite_dim_coefficients(double d, double F, double snr, double rho2, double n,
                                      double tau, const TheoryConstants& k = {});

struct HMinimum {
  double m_opt = 0.0;
  double h_min = 0.0;
};
/// Closed-form minimizer of h(M) = C1 sqrt(M) + C2 / M^2.
HMinimum argmin_h(double C1, double C2);

/// c' (1/(1 - rho2))^{4/5} (d n^{3/2} / (snr F^2))^{2/5}; in_window reports
/// snr / n^{3/2} <= d / F^2 <= snr n.
OptimalM optimal_m_finite(double d, double F, double snr, double rho2, double n,
                          const TheoryConstants& k = {});

// --- strong-weak features, general source Phi(t) = t^p --------------------

/// c3 C_rho1 [log^{1/2}(2M/delta)] (R2 F / d) sqrt(M/n) + c4 Delta^{-1} (n/M^2)/F
/// with C_rho1 = rho1 Phi(rho1) + 1 and Delta = (rho1 - rho2)^2.
TwoTerms general_source_bound_terms(double d, double F, double R2, double rho2,
                                    double phi_exponent, double n, double M,
                                    const TheoryConstants& k = {}, double rho1 = 1.0,
                                    bool with_log = true);

/// A (d n^{3/2} / (R2 Delta F^2))^{2/5} with A = (4 c4 / (c3 C_rho1))^{2/5}.
/// in_window requires n^{-3/2} <= d/(Delta F^2) <= n and rho2 Phi(rho2) d <= F.
OptimalM optimal_m_general_source(double d, double F, double R2, double rho2,
                                  double phi_exponent, double n,
                                  const TheoryConstants& k = {}, double rho1 = 1.0);

// --- efficiency and scaling -----------------------------------------------

enum class Setting { FiniteDim, InfiniteDim };

/// Order-of-magnitude efficiency at the optimal split: M_opt^2 in finite
/// dimension, M_opt in infinite dimension.
double efficiency_prediction(Setting setting, double m_opt);

/// Rate exponent of the high-dimensional infinite-worker limit for
/// d_n ~ n^gamma, F_n ~ n^delta: the risk decays like n^{-(1+delta)/5}.
struct RateExponent {
  double exponent = 0.0;
  bool valid = false;  ///< gamma > 1, 0 < delta < 5/4, max{1,delta,2delta-3/2} <= gamma <= 2delta+1
};
RateExponent infinite_worker_rate(double gamma, double delta);

/// Divisor of n closest to m on a log scale (ties go to the smaller divisor).
std::size_t round_to_divisor(double m, std::size_t n);

// --- curves ---------------------------------------------------------------

struct TheoryPoint {
  std::size_t M = 0;
  double bias_bound = 0.0;
  double var_bound = 0.0;   ///< NaN when k* is infinite
  double total_bound = 0.0;
  double lower_bound = 0.0; ///< NaN when k* is infinite
  double universal_lower = 0.0;  ///< NaN for truncated infinite spectra
  double family_bound = 0.0;     ///< NaN when no closed form applies
  bool k_finite = true;
  bool k_condition = true;
  bool sample_condition = true;
  bool family_window = true;
};

struct TheoryCurve {
  std::vector<TheoryPoint> points;
  double m_opt_formula = 0.0;     ///< NaN when no closed form applies
  bool m_opt_formula_window = true;
  std::size_t m_opt_gridsearch = 0;  ///< argmin of total_bound on the grid (0 if none finite)
  TheoryConstants constants;
};

/// Evaluates every applicable bound of `config` on the M grid. sigma_noise
/// feeds the lower bounds (tau when omitted).
TheoryCurve evaluate_curve(const ModelConfig& config, const std::vector<std::size_t>& grid,
                           const TheoryConstants& k = {}, double sigma_noise = -1.0);

}  // namespace ridgeless::theory
