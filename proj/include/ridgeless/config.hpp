#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ridgeless/simulate.hpp"
#include "ridgeless/spectra.hpp"
#include "ridgeless/theory.hpp"

namespace ridgeless {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::size_t kMsdTrainRows = 463715;

enum class Preset {
  Fig1Left,
  Fig1Right,
  Fig2Left,
  Fig2Right,
  Fig3DoubleDescent,
  Fig45EigenDecay,
  Custom
};

std::string to_string(Preset preset);
/// Accepts the snake_case names printed by to_string.
Preset parse_preset(const std::string& name);
std::vector<std::string> preset_names();

struct SpectrumSpec {
  SpectrumKind kind = SpectrumKind::StrongWeak;
  std::size_t dim = 1;
  bool infinite = false;
  std::size_t trunc_dim = kDefaultTruncDim;
  double eps = 1.0;
  std::size_t num_strong = 1;
  double rho1 = 1.0;
  double rho2 = 0.5;
  std::filesystem::path path;  ///< explicit spectra
  std::vector<double> values;  ///< explicit spectra given inline
};

enum class PriorKind { RandomEffects, Source, GeneralSource };

struct PriorSpec {
  PriorKind kind = PriorKind::RandomEffects;
  double snr = 1.0;
  double alpha = 0.0;
  double R2 = 1.0;
  SourceFunction phi = SourceFunction::Isotropic;
  bool theta_ignores_tau = false;
};

/// How a requested M that does not divide n is handled.
enum class MPolicy { Strict, Round };

struct RealDataSpec {
  std::filesystem::path path;
  std::size_t target_column = 0;
  std::size_t train_rows = kMsdTrainRows;
  std::size_t n_subsample = 45;
};

/// One curve of a sweep: the sweepable fields resolved to concrete values.
struct SeriesSpec {
  std::size_t n = 1;
  std::size_t d = 1;
  std::size_t F = 0;
  double rho2 = 0.0;
  double eps = 0.0;
  std::vector<std::size_t> grid;  ///< M values, increasing, all dividing n
  std::vector<std::size_t> dropped;  ///< requested M values that were rounded away
};

struct ExperimentConfig {
  Preset preset = Preset::Custom;
  SpectrumSpec spectrum;
  PriorSpec prior;
  std::size_t n = 1;
  double tau = 1.0;

  std::vector<std::size_t> M_values;  ///< empty: every divisor of n
  MPolicy m_policy = MPolicy::Strict;
  std::vector<std::size_t> n_values;
  std::vector<std::size_t> d_values;
  std::vector<std::size_t> F_values;
  std::vector<double> rho2_values;
  std::vector<double> eps_values;

  std::size_t reps = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::optional<double> rank_tol;
  std::filesystem::path output = "results";

  theory::TheoryConstants constants;
  RealDataSpec realdata;

  /// Throws ConfigError naming the offending field path.
  void validate() const;
  bool is_realdata() const noexcept {
    return preset == Preset::Fig2Left || preset == Preset::Fig2Right;
  }

  /// Cartesian product of the sweep lists, in a fixed order.
  std::vector<SeriesSpec> series() const;
  Spectrum build_spectrum(const SeriesSpec& s) const;
  ModelConfig model(const SeriesSpec& s) const;

  /// Canonical "key=value" lines covering everything that affects results
  /// (threads and output path excluded).
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), 16 lowercase hex digits.
  std::string hash() const;
};

ExperimentConfig preset_config(Preset preset);

/// Parses a flat INI-style file ("[section]" headers, "key = value" lines,
/// ';' or '#' comments). A `preset` key seeds the defaults; every other key
/// overrides them. Unknown keys and bad values raise ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);

std::uint64_t fnv1a64(std::string_view text) noexcept;

}  // namespace ridgeless
