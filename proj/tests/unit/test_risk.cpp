#include <doctest.h>

#include <random>

#include "../oracles.hpp"
#include "ridgeless/errors.hpp"
#include "ridgeless/risk.hpp"

using namespace ridgeless;

namespace {

Eigen::VectorXd lambda_of(const Spectrum& s) {
  Eigen::VectorXd lam(static_cast<Eigen::Index>(s.dim()));
  for (std::size_t j = 0; j < s.dim(); ++j) lam[static_cast<Eigen::Index>(j)] = s.eigenvalue(j + 1);
  return lam;
}

}  // namespace

TEST_CASE("excess risk") {
  const Eigen::Vector2d b(1, 2);
  CHECK(excess_risk(b, b, Spectrum::isotropic(2)) == 0.0);
  CHECK(excess_risk(Eigen::Vector2d(3, 4), Eigen::Vector2d(0, 0), Spectrum::isotropic(2)) == 25.0);
  CHECK(excess_risk(Eigen::Vector2d(1, 1), Eigen::Vector2d(0, 0), Spectrum::strong_weak(1, 2, 0.5)) ==
        doctest::Approx(1.5));
  CHECK_THROWS_AS(excess_risk(Eigen::Vector3d(1, 1, 1), b, Spectrum::isotropic(2)), InputError);
}

TEST_CASE("conditional variance against the dense oracle") {
  std::mt19937_64 gen(11);
  const Spectrum s = Spectrum::strong_weak(5, 16, 0.1);
  const Eigen::VectorXd lam = lambda_of(s);
  for (int M : {1, 2, 4}) {
    const Eigen::MatrixXd X = oracle::gaussian(24, 16, gen) * lam.cwiseSqrt().asDiagonal();
    const auto shards = oracle::row_blocks(X, static_cast<std::size_t>(M));
    const double got = conditional_variance(std::span<const Eigen::MatrixXd>(shards), s, 0.8);
    CHECK(oracle::rel_err(got, oracle::cond_var(shards, lam, 0.8)) < 1e-10);
  }
  const auto one = oracle::row_blocks(Eigen::MatrixXd::Identity(6, 6), 1);
  CHECK(conditional_variance(std::span<const Eigen::MatrixXd>(one), Spectrum::isotropic(6), 2.0) ==
        doctest::Approx(24.0).epsilon(1e-12));
  CHECK(conditional_variance(std::span<const Eigen::MatrixXd>(one), Spectrum::isotropic(6), 0.0) == 0.0);
}

TEST_CASE("conditional bias against the dense oracle") {
  std::mt19937_64 gen(12);
  const Spectrum s = Spectrum::polynomial_decay(0.4, 8);
  const Eigen::VectorXd lam = lambda_of(s);
  const Eigen::VectorXd beta = oracle::gaussian_vector(8, gen);
  const auto single = oracle::row_blocks(oracle::gaussian(5, 8, gen), 1);
  CHECK(oracle::rel_err(conditional_bias(std::span<const Eigen::MatrixXd>(single), beta, s),
                        oracle::cond_bias(single, lam, beta)) < 1e-10);
  const auto three = oracle::row_blocks(oracle::gaussian(15, 8, gen), 3);
  CHECK(oracle::rel_err(conditional_bias(std::span<const Eigen::MatrixXd>(three), beta, s),
                        oracle::cond_bias(three, lam, beta)) < 1e-10);
  CHECK(conditional_bias(std::span<const Eigen::MatrixXd>(three), Eigen::VectorXd::Zero(8), s) == 0.0);
  const auto tall = oracle::row_blocks(oracle::gaussian(40, 8, gen), 2);
  CHECK(conditional_bias(std::span<const Eigen::MatrixXd>(tall), beta, s) <= 1e-12);
}

TEST_CASE("conditional variance matches a Monte-Carlo average over noise") {
  std::mt19937_64 gen(13);
  const Spectrum s = Spectrum::polynomial_decay(1.0, 12);
  const Eigen::VectorXd lam = lambda_of(s);
  const Eigen::MatrixXd X = oracle::gaussian(16, 12, gen) * lam.cwiseSqrt().asDiagonal();
  const auto shards = oracle::row_blocks(X, 2);
  std::vector<Eigen::MatrixXd> pinvs;
  for (const auto& S : shards) pinvs.push_back(oracle::pinv(S));
  std::normal_distribution<double> z;
  const int reps = 10000;
  double acc = 0.0;
  for (int r = 0; r < reps; ++r) {
    Eigen::VectorXd dev = Eigen::VectorXd::Zero(12);
    for (const auto& P : pinvs) {
      Eigen::VectorXd eps(8);
      for (int i = 0; i < 8; ++i) eps[i] = 0.5 * z(gen);
      dev += P * eps;
    }
    dev /= 2.0;
    acc += (lam.array() * dev.array().square()).sum();
  }
  const double exact = conditional_variance(std::span<const Eigen::MatrixXd>(shards), s, 0.5);
  CHECK(oracle::rel_err(acc / reps, exact) < 0.05);
}

TEST_CASE("bias envelope is a diagnostic, not a bound") {
  // Sigma = I, one row (sqrt 2, 0), beta* = (1, 1): bias 1, envelope 0.
  Eigen::MatrixXd X(1, 2);
  X << std::sqrt(2.0), 0.0;
  const std::vector<Eigen::MatrixXd> shards{X};
  const Eigen::Vector2d beta(1, 1);
  const Spectrum s = Spectrum::isotropic(2);
  CHECK(conditional_bias(std::span<const Eigen::MatrixXd>(shards), beta, s) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bias_envelope(std::span<const Eigen::MatrixXd>(shards), beta, s) == doctest::Approx(0.0));
}

TEST_CASE("variance envelope dominates with factor 8") {
  std::mt19937_64 gen(14);
  const Spectrum s = Spectrum::isotropic(10);
  const Eigen::MatrixXd X = oracle::gaussian(12, 10, gen);
  std::vector<ShardDecomposition> shards;
  for (const auto& S : oracle::row_blocks(X, 3)) shards.emplace_back(S);
  const double var = conditional_variance(std::span<const ShardDecomposition>(shards), s, 1.3);
  CHECK(variance_envelope(std::span<const ShardDecomposition>(shards), s, 1.3) ==
        doctest::Approx(8.0 * var).epsilon(1e-14));
}

TEST_CASE("noiseless underparameterized shards give zero risk") {
  ModelConfig c{Spectrum::polynomial_decay(0.5, 6)};
  c.n = 60;
  c.noise_tau = 0.0;
  c.prior = RandomEffectsPrior{1.0, true};
  const Dataset data = make_dataset(c, 0);
  const RealizationRisk r = evaluate_realization(data, c.spectrum, 0.0, split(60, 5));
  CHECK(r.cond_bias <= 1e-12);
  CHECK(r.cond_var == 0.0);
  CHECK(std::abs(r.excess_risk - r.cond_bias) <= 1e-10);
  CHECK(r.min_rank == 6);
}

TEST_CASE("Monte-Carlo decomposition identity on fixed designs") {
  ModelConfig c{Spectrum::polynomial_decay(0.5, 40)};
  c.n = 24;
  c.noise_tau = 0.5;
  c.prior = RandomEffectsPrior{1.0};
  c.seed = 3;
  const RiskReport r = monte_carlo_risk(c, 3, 4000, Resample::NoiseOnly);
  CHECK(r.designs_fixed);
  CHECK(r.reps == 4000);
  const double target = r.cond_bias + r.cond_var;
  CHECK(std::abs(r.mc_mean - target) <= std::max(0.05 * target, 3.0 * r.mc_stderr));
  CHECK(r.variance_envelope_holds);

  MonteCarloOptions opt;
  opt.threads = 3;
  const RiskReport again = monte_carlo_risk(c, 3, 4000, Resample::NoiseOnly, opt);
  CHECK(again.mc_mean == r.mc_mean);
  CHECK(again.mc_stderr == r.mc_stderr);

  const RiskReport full = monte_carlo_risk(c, 3, 50, Resample::Full);
  CHECK_FALSE(full.designs_fixed);
  CHECK(full.cond_bias_stderr > 0.0);
}

TEST_CASE("efficiency and summary statistics") {
  CHECK(efficiency(2.0, 2.0) == 1.0);
  CHECK(efficiency(2.0, 1.0) == 2.0);
  CHECK_THROWS_AS(efficiency(1.0, 0.0), PreconditionError);
  const std::vector<double> v{1, 2, 3, 4};
  const MeanStderr ms = mean_stderr(v);
  CHECK(ms.mean == 2.5);
  CHECK(ms.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  const std::vector<double> one{7};
  CHECK(mean_stderr(one).stderr_ == 0.0);
}
