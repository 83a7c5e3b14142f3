#include "ridgeless/spectra.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ridgeless/errors.hpp"

namespace ridgeless {
namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// sum_{j > T} j^{-s} by Euler-Maclaurin (three terms), s > 1.
double power_tail(double s, double T) {
  return std::pow(T, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(T, -s) +
         s * std::pow(T, -s - 1.0) / 12.0;
}

std::vector<double> power_law(double eps, std::size_t dim) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw ParameterError("polynomial decay requires eps > 0, got " + std::to_string(eps));
  }
  if (dim == 0) throw ParameterError("spectrum dimension must be positive");
  std::vector<double> values(dim);
  for (std::size_t j = 1; j <= dim; ++j) {
    values[j - 1] = std::pow(static_cast<double>(j), -(1.0 + eps));
  }
  return values;
}

}  // namespace

std::string to_string(SpectrumKind kind) {
  switch (kind) {
    case SpectrumKind::PolynomialDecay: return "poly";
    case SpectrumKind::StrongWeak: return "strong_weak";
    case SpectrumKind::Explicit: return "explicit";
  }
  return "unknown";
}

Spectrum::Spectrum(SpectrumKind kind, std::vector<double> values, bool infinite)
    : kind_(kind), values_(std::move(values)), infinite_(infinite) {
  if (values_.empty()) throw ParameterError("spectrum must have at least one eigenvalue");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ParameterError("eigenvalue " + std::to_string(i + 1) +
                           " must be positive and finite");
    }
    if (i > 0 && v > values_[i - 1]) {
      throw ParameterError("eigenvalues must be non-increasing (index " +
                           std::to_string(i + 1) + ")");
    }
  }
  const std::size_t d = values_.size();
  tail_sum_.assign(d + 1, 0.0);
  tail_sq_sum_.assign(d + 1, 0.0);
  CompensatedSum sum, sum_sq;
  for (std::size_t k = d; k-- > 0;) {
    sum.add(values_[k]);
    sum_sq.add(values_[k] * values_[k]);
    tail_sum_[k] = sum.value();
    tail_sq_sum_[k] = sum_sq.value();
  }
  working_trace_ = tail_sum_.front();
}

Spectrum Spectrum::polynomial_decay(double eps, std::size_t dim) {
  Spectrum s(SpectrumKind::PolynomialDecay, power_law(eps, dim), false);
  s.eps_ = eps;
  return s;
}

Spectrum Spectrum::polynomial_decay_infinite(double eps, std::size_t trunc_dim) {
  Spectrum s(SpectrumKind::PolynomialDecay, power_law(eps, trunc_dim), true);
  s.eps_ = eps;
  const double T = static_cast<double>(trunc_dim);
  s.truncated_mass_ = power_tail(1.0 + eps, T);
  // Effective ranks describe the untruncated operator: fold the analytic tail
  // back into every tail sum.
  const double truncated_sq = power_tail(2.0 * (1.0 + eps), T);
  for (std::size_t k = 0; k < s.tail_sum_.size(); ++k) {
    s.tail_sum_[k] += s.truncated_mass_;
    s.tail_sq_sum_[k] += truncated_sq;
  }
  return s;
}

Spectrum Spectrum::strong_weak(std::size_t num_strong, std::size_t dim, double rho2,
                               double rho1) {
  if (num_strong == 0 || num_strong > dim) {
    throw ParameterError("strong-weak model requires 1 <= F <= d");
  }
  if (!(rho1 > rho2 && rho2 > 0.0)) {
    throw ParameterError("strong-weak model requires rho1 > rho2 > 0");
  }
  std::vector<double> values(dim, rho2);
  std::fill_n(values.begin(), num_strong, rho1);
  Spectrum s(SpectrumKind::StrongWeak, std::move(values), false);
  s.num_strong_ = num_strong;
  s.rho1_ = rho1;
  s.rho2_ = rho2;
  return s;
}

Spectrum Spectrum::explicit_values(std::vector<double> values) {
  return Spectrum(SpectrumKind::Explicit, std::move(values), false);
}

Spectrum Spectrum::isotropic(std::size_t dim) {
  if (dim == 0) throw ParameterError("spectrum dimension must be positive");
  return explicit_values(std::vector<double>(dim, 1.0));
}

Spectrum Spectrum::load_explicit(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open spectrum file: " + path.string());
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream field(line);
    double v = 0.0;
    std::string rest;
    if (!(field >> v) || (field >> rest)) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected one numeric column");
    }
    values.push_back(v);
  }
  return explicit_values(std::move(values));
}

double Spectrum::eigenvalue(std::size_t j) const {
  if (j < 1 || j > values_.size()) {
    throw BoundsError("eigenvalue index " + std::to_string(j) + " outside [1, " +
                      std::to_string(values_.size()) + "]");
  }
  return values_[j - 1];
}

double Spectrum::weighted_trace(double alpha) const {
  if (!(alpha >= 0.0)) throw ParameterError("weighted_trace requires alpha >= 0");
  CompensatedSum sum;
  for (auto it = values_.rbegin(); it != values_.rend(); ++it) {
    sum.add(std::pow(*it, 1.0 + alpha));
  }
  const double out = sum.value();
  if (!std::isfinite(out)) throw NumericError("weighted_trace overflowed");
  return out;
}

EffectiveRankReport Spectrum::report(std::size_t k) const {
  if (k >= values_.size()) {
    throw PreconditionError("effective rank at k=" + std::to_string(k) +
                            " needs lambda_{k+1} within the working dimension " +
                            std::to_string(values_.size()));
  }
  EffectiveRankReport r;
  r.k = k;
  r.tail_sum = tail_sum_[k];
  r.tail_sq_sum = tail_sq_sum_[k];
  r.r_k = r.tail_sum / values_[k];
  r.R_k = r.tail_sum * r.tail_sum / r.tail_sq_sum;
  r.truncated_mass = truncated_mass_;
  return r;
}

EffectiveRankReport Spectrum::effective_rank_r(std::size_t k) const { return report(k); }

EffectiveRankReport Spectrum::effective_rank_R(std::size_t k) const { return report(k); }

EffectiveDimension Spectrum::effective_dimension(std::size_t n_local, double a) const {
  if (!(a > 1.0)) throw ParameterError("effective dimension requires a > 1");
  if (n_local == 0) throw ParameterError("effective dimension requires n_local >= 1");
  const double threshold = a * static_cast<double>(n_local);
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (tail_sum_[k] / values_[k] >= threshold) return k;
  }
  return std::nullopt;
}

std::string Spectrum::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind_) << "(dim=" << values_.size();
  switch (kind_) {
    case SpectrumKind::PolynomialDecay:
      os << ",eps=" << eps_ << ",infinite=" << infinite_;
      break;
    case SpectrumKind::StrongWeak:
      os << ",F=" << num_strong_ << ",rho1=" << rho1_ << ",rho2=" << rho2_;
      break;
    case SpectrumKind::Explicit: {
      std::uint64_t h = 1469598103934665603ull;
      for (double v : values_) {
        std::uint64_t bits;
        static_assert(sizeof bits == sizeof v);
        std::memcpy(&bits, &v, sizeof bits);
        h = (h ^ bits) * 1099511628211ull;
      }
      os << ",values_hash=" << std::hex << h << std::dec;
      break;
    }
  }
  os << ")";
  return os.str();
}

}  // namespace ridgeless
