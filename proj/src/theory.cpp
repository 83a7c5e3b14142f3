#include "ridgeless/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <variant>

#include "ridgeless/errors.hpp"
#include "ridgeless/format.hpp"

namespace ridgeless::theory {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double log_factor(double M, double delta) { return std::sqrt(std::log(2.0 * M / delta)); }

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ParameterError(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

void TheoryConstants::validate() const {
  for (double v : {c1, c2, c3, c4, c_a, sigma_x, c, c_tilde, c_prime}) {
    if (!(v > 0.0)) throw ParameterError("theory constants must be positive");
  }
  if (!(a > 1.0)) throw ParameterError("theory constant a must be > 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw ParameterError("delta must lie in (0, 1]");
}

std::string TheoryConstants::describe() const {
  std::ostringstream os;
  os << "c1=" << format_double(c1) << ";c2=" << format_double(c2)
     << ";c3=" << format_double(c3) << ";c4=" << format_double(c4)
     << ";a=" << format_double(a) << ";c_a=" << format_double(c_a)
     << ";sigma_x=" << format_double(sigma_x) << ";delta=" << format_double(delta)
     << ";c=" << format_double(c) << ";c_tilde=" << format_double(c_tilde)
     << ";c_prime=" << format_double(c_prime);
  return os.str();
}

double bias_bound_general(double trace_sigma_theta, double n, double M,
                          const TheoryConstants& k) {
  require_positive(n, "n");
  require_positive(M, "M");
  return 4.0 * k.sigma_x / k.c1 * log_factor(M, k.delta) * trace_sigma_theta * std::sqrt(M / n);
}

bool bias_sample_condition(double n, double M, const TheoryConstants& k) {
  return n / M >= std::log(2.0 / k.delta) / k.c1;
}

double variance_bracket(const Spectrum& spectrum, std::size_t n, std::size_t M, double a) {
  if (M == 0 || M > n) throw ParameterError("variance bracket requires 1 <= M <= n");
  const std::size_t local = n / M;
  const EffectiveDimension k_star = spectrum.effective_dimension(local, a);
  if (!k_star) {
    throw BoundUndefinedError("effective dimension is infinite for n/M=" +
                              std::to_string(local));
  }
  const double R = spectrum.effective_rank_R(*k_star).R_k;
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(M);
  return static_cast<double>(*k_star) / nn + nn / (mm * mm) / R;
}

double variance_bound_general(const Spectrum& spectrum, std::size_t n, std::size_t M,
                              double tau, const TheoryConstants& k) {
  return 8.0 * k.c2 * tau * tau * variance_bracket(spectrum, n, M, k.a);
}

bool variance_k_condition(const Spectrum& spectrum, std::size_t n, std::size_t M,
                          const TheoryConstants& k) {
  const EffectiveDimension k_star = spectrum.effective_dimension(n / M, k.a);
  return k_star && static_cast<double>(*k_star) <=
                       static_cast<double>(n) / (k.c2 * static_cast<double>(M));
}

double lower_bound_general(const Spectrum& spectrum, std::size_t n, std::size_t M,
                           double sigma_noise, const TheoryConstants& k) {
  return k.c_a * sigma_noise * sigma_noise * variance_bracket(spectrum, n, M, k.a);
}

double universal_lower_bound(double d, double n, double M, double tau_tilde) {
  require_positive(d, "d");
  require_positive(M, "M");
  const double b = n / M;
  if (!(b >= 1.0)) throw ParameterError("universal lower bound requires n/M >= 1");
  const double lo = std::min(d, b);
  const double hi = std::max(d, b);
  return tau_tilde * tau_tilde / M * lo / (hi + 1.0 - lo);
}

double c_alpha_n(double alpha, double eps) {
  if (!(alpha >= 0.0)) throw ParameterError("alpha must be >= 0");
  if (alpha > 0.0) return 1.0 / alpha;
  if (!(eps > 0.0)) throw ParameterError("C_{alpha,n} with alpha = 0 requires eps > 0");
  return 1.0 / eps;
}

TwoTerms poly_bound_terms(double alpha, double eps, double n, double M, double tau,
                          const TheoryConstants& k, bool with_log) {
  require_positive(n, "n");
  require_positive(M, "M");
  const double log_term = with_log ? log_factor(M, k.delta) : 1.0;
  return {k.c3 * k.sigma_x * log_term * c_alpha_n(alpha, eps) * std::sqrt(M / n),
          k.c4 * tau * tau * eps / M};
}

double poly_total_bound(double alpha, double eps, double n, double M, double tau,
                        const TheoryConstants& k) {
  return poly_bound_terms(alpha, eps, n, M, tau, k).total();
}

OptimalM optimal_m_poly(double alpha, double eps, double n, double tau,
                        const TheoryConstants& k) {
  if (!(alpha >= 0.0)) throw ParameterError("alpha must be >= 0");
  require_positive(eps, "eps");
  require_positive(n, "n");
  const double C = std::pow(k.c4 * tau * tau / (k.c3 * k.sigma_x), 2.0 / 3.0);
  const double rate = alpha > 0.0 ? alpha * eps : eps * eps;
  const double window_value = alpha > 0.0 ? eps : eps * eps;
  OptimalM out;
  out.m = C * std::pow(rate * std::sqrt(n), 2.0 / 3.0);
  out.in_window = 1.0 / std::sqrt(n) <= window_value && window_value <= n;
  return out;
}

FiniteDimFlags finite_dim_flags(double d, double F, double rho2, double n, double M,
                                const TheoryConstants& k) {
  return {k.a * n / M < (1.0 - rho2) * F + rho2 * d, rho2 * d <= F};
}

TwoTerms finite_dim_bound_terms(double d, double F, double snr, double rho2, double n, double M,
                                double tau, const TheoryConstants& k, bool with_log) {
  require_positive(d, "d");
  require_positive(F, "F");
  require_positive(n, "n");
  require_positive(M, "M");
  if (!(rho2 >= 0.0 && rho2 < 1.0)) throw ParameterError("rho2 must lie in [0, 1)");
  const double log_term = with_log ? log_factor(M, k.delta) : 1.0;
  const double c_rho2 = 1.0 / ((1.0 - rho2) * (1.0 - rho2));
  return {k.c * k.sigma_x * snr / d * F * log_term * std::sqrt(M / n),
          k.c_tilde * tau * tau * c_rho2 * n / (M * M) / F};
}

double finite_dim_total_bound(double d, double F, double snr, double rho2, double n, double M,
                              double tau, const TheoryConstants& k) {
  return finite_dim_bound_terms(d, F, snr, rho2, n, M, tau, k).total();
}

HCoefficients finite_dim_coefficients(double d, double F, double snr, double rho2, double n,
                                      double tau, const TheoryConstants& k) {
  // Terms at M = 1 without the log factor are exactly C1 and C2.
  const TwoTerms at_one = finite_dim_bound_terms(d, F, snr, rho2, n, 1.0, tau, k, false);
  return {at_one.bias, at_one.variance};
}

HMinimum argmin_h(double C1, double C2) {
  require_positive(C1, "C1");
  require_positive(C2, "C2");
  HMinimum out;
  out.m_opt = std::pow(4.0 * C2 / C1, 2.0 / 5.0);
  out.h_min = 5.0 * C2 * std::pow(C1 / (4.0 * C2), 4.0 / 5.0);
  return out;
}

OptimalM optimal_m_finite(double d, double F, double snr, double rho2, double n,
                          const TheoryConstants& k) {
  require_positive(d, "d");
  require_positive(F, "F");
  require_positive(snr, "snr");
  require_positive(n, "n");
  if (!(rho2 >= 0.0 && rho2 < 1.0)) throw ParameterError("rho2 must lie in [0, 1)");
  const double A = k.c_prime * std::pow(1.0 / (1.0 - rho2), 4.0 / 5.0);
  const double ratio = d / (F * F);
  OptimalM out;
  out.m = A * std::pow(d * std::pow(n, 1.5) / (snr * F * F), 2.0 / 5.0);
  out.in_window = snr / std::pow(n, 1.5) <= ratio && ratio <= snr * n;
  return out;
}

TwoTerms general_source_bound_terms(double d, double F, double R2, double rho2,
                                    double phi_exponent, double n, double M,
                                    const TheoryConstants& k, double rho1, bool with_log) {
  require_positive(d, "d");
  require_positive(F, "F");
  require_positive(R2, "R2");
  require_positive(n, "n");
  require_positive(M, "M");
  if (!(rho1 > rho2 && rho2 > 0.0)) throw ParameterError("requires rho1 > rho2 > 0");
  const double log_term = with_log ? log_factor(M, k.delta) : 1.0;
  const double c_rho1 = rho1 * std::pow(rho1, phi_exponent) + 1.0;
  const double gap = (rho1 - rho2) * (rho1 - rho2);
  return {k.c3 * c_rho1 * log_term * R2 * F / d * std::sqrt(M / n),
          k.c4 / gap * n / (M * M) / F};
}

OptimalM optimal_m_general_source(double d, double F, double R2, double rho2,
                                  double phi_exponent, double n, const TheoryConstants& k,
                                  double rho1) {
  require_positive(d, "d");
  require_positive(F, "F");
  require_positive(R2, "R2");
  require_positive(n, "n");
  if (!(rho1 > rho2 && rho2 > 0.0)) throw ParameterError("requires rho1 > rho2 > 0");
  const double c_rho1 = rho1 * std::pow(rho1, phi_exponent) + 1.0;
  const double gap = (rho1 - rho2) * (rho1 - rho2);
  const double A = std::pow(4.0 * k.c4 / (k.c3 * c_rho1), 2.0 / 5.0);
  const double ratio = d / (gap * F * F);
  OptimalM out;
  out.m = A * std::pow(d * std::pow(n, 1.5) / (R2 * gap * F * F), 2.0 / 5.0);
  const bool window = std::pow(n, -1.5) <= ratio && ratio <= n;
  const bool weak_small = rho2 * std::pow(rho2, phi_exponent) * d <= F;
  out.in_window = window && weak_small;
  return out;
}

double efficiency_prediction(Setting setting, double m_opt) {
  if (!(m_opt >= 1.0)) throw ParameterError("efficiency prediction requires m_opt >= 1");
  return setting == Setting::FiniteDim ? m_opt * m_opt : m_opt;
}

RateExponent infinite_worker_rate(double gamma, double delta) {
  RateExponent out;
  out.exponent = (1.0 + delta) / 5.0;
  const double lower = std::max({1.0, delta, 2.0 * delta - 1.5});
  out.valid = gamma > 1.0 && delta > 0.0 && delta < 1.25 && lower <= gamma &&
              gamma <= 2.0 * delta + 1.0;
  return out;
}

std::size_t round_to_divisor(double m, std::size_t n) {
  if (n == 0) throw ParameterError("round_to_divisor requires n >= 1");
  const double target = std::log(std::max(m, 1.0));
  std::size_t best = 1;
  double best_gap = std::numeric_limits<double>::infinity();
  for (const std::size_t div : divisors(n)) {
    const double gap = std::abs(std::log(static_cast<double>(div)) - target);
    if (gap < best_gap - 1e-12) {
      best_gap = gap;
      best = div;
    }
  }
  return best;
}

TheoryCurve evaluate_curve(const ModelConfig& config, const std::vector<std::size_t>& grid,
                           const TheoryConstants& k, double sigma_noise) {
  k.validate();
  const Spectrum& spectrum = config.spectrum;
  const double tau = config.noise_tau;
  const double sigma = sigma_noise >= 0.0 ? sigma_noise : tau;
  const double n = static_cast<double>(config.n);
  const double d = static_cast<double>(spectrum.dim());
  const double trace_theta = signal_trace(config);

  const auto* random_effects = std::get_if<RandomEffectsPrior>(&config.prior);
  const auto* source = std::get_if<SourcePrior>(&config.prior);

  TheoryCurve curve;
  curve.constants = k;
  curve.m_opt_formula = kNaN;
  if (spectrum.kind() == SpectrumKind::PolynomialDecay && (random_effects || source)) {
    const double alpha = source ? source->exponent : 0.0;
    if (alpha >= 0.0) {
      const OptimalM opt = optimal_m_poly(alpha, spectrum.eps(), n, tau, k);
      curve.m_opt_formula = opt.m;
      curve.m_opt_formula_window = opt.in_window;
    }
  } else if (spectrum.kind() == SpectrumKind::StrongWeak && random_effects &&
             random_effects->snr > 0.0) {
    const OptimalM opt = optimal_m_finite(d, static_cast<double>(spectrum.num_strong()),
                                          random_effects->snr, spectrum.rho_weak(), n, k);
    curve.m_opt_formula = opt.m;
    curve.m_opt_formula_window = opt.in_window;
  } else if (spectrum.kind() == SpectrumKind::StrongWeak && source) {
    const OptimalM opt = optimal_m_general_source(
        d, static_cast<double>(spectrum.num_strong()), source->R2, spectrum.rho_weak(),
        source->exponent, n, k, spectrum.rho_strong());
    curve.m_opt_formula = opt.m;
    curve.m_opt_formula_window = opt.in_window;
  }

  double best = std::numeric_limits<double>::infinity();
  for (const std::size_t M : grid) {
    TheoryPoint p;
    p.M = M;
    const double mm = static_cast<double>(M);
    p.bias_bound = bias_bound_general(trace_theta, n, mm, k);
    p.sample_condition = bias_sample_condition(n, mm, k);
    try {
      p.var_bound = variance_bound_general(spectrum, config.n, M, tau, k);
      p.lower_bound = lower_bound_general(spectrum, config.n, M, sigma, k);
      p.k_condition = variance_k_condition(spectrum, config.n, M, k);
    } catch (const BoundUndefinedError&) {
      p.var_bound = p.lower_bound = kNaN;
      p.k_finite = p.k_condition = false;
    }
    p.total_bound = p.bias_bound + p.var_bound;
    p.universal_lower = spectrum.infinite() ? kNaN : universal_lower_bound(d, n, mm, sigma);

    p.family_bound = kNaN;
    if (spectrum.kind() == SpectrumKind::PolynomialDecay && (random_effects || source)) {
      const double alpha = source ? source->exponent : 0.0;
      if (alpha >= 0.0) p.family_bound = poly_total_bound(alpha, spectrum.eps(), n, mm, tau, k);
    } else if (spectrum.kind() == SpectrumKind::StrongWeak && random_effects) {
      const double F = static_cast<double>(spectrum.num_strong());
      p.family_bound = finite_dim_total_bound(d, F, random_effects->snr, spectrum.rho_weak(),
                                              n, mm, tau, k);
      const FiniteDimFlags flags = finite_dim_flags(d, F, spectrum.rho_weak(), n, mm, k);
      p.family_window = flags.cond_F && flags.weak_small;
    } else if (spectrum.kind() == SpectrumKind::StrongWeak && source) {
      const double F = static_cast<double>(spectrum.num_strong());
      p.family_bound = general_source_bound_terms(d, F, source->R2, spectrum.rho_weak(),
                                                  source->exponent, n, mm, k,
                                                  spectrum.rho_strong())
                           .total();
      const double rho2 = spectrum.rho_weak();
      p.family_window = rho2 * std::pow(rho2, source->exponent) * d <= F;
    }

    if (std::isfinite(p.total_bound) && p.total_bound < best) {
      best = p.total_bound;
      curve.m_opt_gridsearch = M;
    }
    curve.points.push_back(p);
  }
  return curve;
}

}  // namespace ridgeless::theory
