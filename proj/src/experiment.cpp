#include "ridgeless/experiment.hpp"

#include <cmath>
#include <limits>

#include "ridgeless/errors.hpp"
#include "ridgeless/parallel.hpp"
#include "ridgeless/risk.hpp"

namespace ridgeless {
namespace {

std::vector<double> column_means(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  std::vector<double> out(rows.front().size(), 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    std::vector<double> col;
    col.reserve(rows.size());
    for (const auto& r : rows) col.push_back(r[j]);
    out[j] = mean_stderr(col).mean;
  }
  return out;
}

MeanStderr column_stats(const std::vector<std::vector<double>>& rows, std::size_t j) {
  std::vector<double> col;
  col.reserve(rows.size());
  for (const auto& r : rows) col.push_back(r[j]);
  return mean_stderr(col);
}

std::string flag(const char* name, bool value) {
  return std::string(name) + "=" + (value ? "1" : "0");
}

std::string join_flags(std::initializer_list<std::string> parts) {
  std::string out;
  for (const std::string& p : parts) out += (out.empty() ? "" : ";") + p;
  return out;
}

void append_theory_rows(const ExperimentConfig& config, const SeriesSpec& s, std::size_t d,
                        const theory::TheoryCurve& curve, std::size_t rep_count,
                        ResultTable& table) {
  const ResultRow base = base_row(config, s, d);
  for (const theory::TheoryPoint& p : curve.points) {
    const std::string flags =
        join_flags({flag("k_finite", p.k_finite), flag("k_condition", p.k_condition),
                    flag("sample_condition", p.sample_condition),
                    flag("family_window", p.family_window)});
    auto emit = [&](const char* stat, double value) {
      ResultRow row = base;
      row.M = p.M;
      row.rep_count = rep_count;
      row.stat = stat;
      row.value = value;
      row.valid_flags = flags;
      table.push_back(std::move(row));
    };
    emit("bias_bound", p.bias_bound);
    emit("var_bound", p.var_bound);
    emit("total_bound", p.total_bound);
    emit("lower_bound", p.lower_bound);
    emit("universal_lower", p.universal_lower);
    emit("family_bound", p.family_bound);
  }
  auto emit_series = [&](const char* stat, double value, const std::string& flags) {
    ResultRow row = base;
    row.rep_count = rep_count;
    row.stat = stat;
    row.value = value;
    row.valid_flags = flags;
    table.push_back(std::move(row));
  };
  const std::string window = flag("window", curve.m_opt_formula_window);
  emit_series("m_opt_formula", curve.m_opt_formula, window);
  if (std::isfinite(curve.m_opt_formula)) {
    emit_series("m_opt_formula_divisor",
                static_cast<double>(theory::round_to_divisor(curve.m_opt_formula, s.n)), window);
  }
  emit_series("m_opt_bound_grid", static_cast<double>(curve.m_opt_gridsearch), "");
}

}  // namespace

std::vector<double> SeriesRuns::mean_cond_risk() const {
  std::vector<std::vector<double>> total = cond_bias;
  for (std::size_t r = 0; r < total.size(); ++r) {
    for (std::size_t j = 0; j < total[r].size(); ++j) total[r][j] += cond_var[r][j];
  }
  return column_means(total);
}

std::vector<double> SeriesRuns::mean_risk() const { return column_means(risk); }

std::vector<double> SeriesRuns::efficiency() const {
  const std::vector<double> cr = mean_cond_risk();
  std::vector<double> out(cr.size(), std::numeric_limits<double>::quiet_NaN());
  if (spec.grid.empty() || spec.grid.front() != 1) return out;
  for (std::size_t j = 0; j < cr.size(); ++j) {
    out[j] = cr[j] > 0.0 ? ridgeless::efficiency(cr.front(), cr[j]) : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::size_t argmax_on_grid(const std::vector<std::size_t>& grid, const std::vector<double>& values) {
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < grid.size() && j < values.size(); ++j) {
    if (values[j] > best_value) {
      best_value = values[j];
      best = grid[j];
    }
  }
  return best;
}

std::size_t argmin_on_grid(const std::vector<std::size_t>& grid, const std::vector<double>& values) {
  std::vector<double> negated(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) negated[j] = -values[j];
  return argmax_on_grid(grid, negated);
}

ResultRow base_row(const ExperimentConfig& config, const SeriesSpec& s, std::size_t d) {
  ResultRow row;
  row.preset = to_string(config.preset);
  row.n = s.n;
  row.d = d;
  row.seed = config.seed;
  row.config_hash = config.hash();
  if (config.is_realdata()) return row;
  row.tau = config.tau;
  switch (config.spectrum.kind) {
    case SpectrumKind::StrongWeak:
      row.F = s.F;
      row.rho2 = s.rho2;
      break;
    case SpectrumKind::PolynomialDecay:
      row.eps = s.eps;
      break;
    case SpectrumKind::Explicit:
      break;
  }
  switch (config.prior.kind) {
    case PriorKind::RandomEffects:
      row.snr = config.prior.snr;
      break;
    case PriorKind::Source:
      row.alpha = config.prior.alpha;
      break;
    case PriorKind::GeneralSource:
      row.alpha = source_exponent(config.prior.phi);
      break;
  }
  return row;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  if (config.is_realdata()) {
    throw ConfigError("preset: " + to_string(config.preset) + " is a real-data preset");
  }
  if (config.spectrum.infinite) {
    throw ConfigError("spectrum.infinite: simulation needs a finite spectrum");
  }

  SweepResult result;
  std::vector<ModelConfig> models;
  for (SeriesSpec& s : config.series()) {
    models.push_back(config.model(s));
    s.d = models.back().d();
    SeriesRuns runs;
    runs.spec = std::move(s);
    const std::size_t g = runs.spec.grid.size();
    runs.risk.assign(config.reps, std::vector<double>(g));
    runs.cond_bias = runs.cond_var = runs.risk;
    runs.interpolates.assign(config.reps, std::vector<bool>(g));
    result.series.push_back(std::move(runs));
  }

  const std::size_t num_series = result.series.size();
  // One task per (series, rep); each writes only its own slots.
  std::vector<std::vector<RealizationRisk>> slots(num_series * config.reps);
  parallel_for(slots.size(), config.threads, [&](std::size_t task) {
    const std::size_t si = task / config.reps;
    const auto rep = static_cast<std::uint32_t>(task % config.reps);
    const ModelConfig& model = models[si];
    const Dataset data = make_dataset(model, rep);
    for (std::size_t M : result.series[si].spec.grid) {
      slots[task].push_back(evaluate_realization(data, model.spectrum, model.noise_tau,
                                                 split(model.n, M), config.rank_tol));
    }
  });

  for (std::size_t si = 0; si < num_series; ++si) {
    SeriesRuns& runs = result.series[si];
    for (std::size_t r = 0; r < config.reps; ++r) {
      const auto& row = slots[si * config.reps + r];
      for (std::size_t j = 0; j < row.size(); ++j) {
        runs.risk[r][j] = row[j].excess_risk;
        runs.cond_bias[r][j] = row[j].cond_bias;
        runs.cond_var[r][j] = row[j].cond_var;
        runs.interpolates[r][j] = row[j].all_interpolate;
      }
    }
    runs.theory = theory::evaluate_curve(models[si], runs.spec.grid, config.constants);

    const SeriesSpec& s = runs.spec;
    const ResultRow base = base_row(config, s, s.d);
    std::vector<std::vector<double>> cond_risk = runs.cond_bias;
    for (std::size_t r = 0; r < cond_risk.size(); ++r) {
      for (std::size_t j = 0; j < cond_risk[r].size(); ++j) cond_risk[r][j] += runs.cond_var[r][j];
    }
    const std::vector<double> eff = runs.efficiency();
    for (std::size_t j = 0; j < s.grid.size(); ++j) {
      const std::size_t M = s.grid[j];
      bool interp = true;
      for (std::size_t r = 0; r < config.reps; ++r) interp = interp && runs.interpolates[r][j];
      const std::string flags = join_flags({flag("interpolates", interp),
                                            flag("overparameterized", s.n / M < s.d)});
      auto emit = [&](const char* stat, MeanStderr ms, bool with_stderr = true) {
        ResultRow row = base;
        row.M = M;
        row.rep_count = config.reps;
        row.stat = stat;
        row.value = ms.mean;
        if (with_stderr) row.stderr_ = ms.stderr_;
        row.valid_flags = flags;
        result.table.push_back(std::move(row));
      };
      emit("risk", column_stats(runs.risk, j));
      emit("cond_bias", column_stats(runs.cond_bias, j));
      emit("cond_var", column_stats(runs.cond_var, j));
      emit("cond_risk", column_stats(cond_risk, j));
      if (std::isfinite(eff[j])) emit("efficiency", {eff[j], 0.0}, false);
    }

    auto emit_series = [&](const char* stat, double value) {
      ResultRow row = base;
      row.rep_count = config.reps;
      row.stat = stat;
      row.value = value;
      result.table.push_back(std::move(row));
    };
    emit_series("m_opt_cond_risk",
                static_cast<double>(argmin_on_grid(s.grid, runs.mean_cond_risk())));
    emit_series("m_opt_risk", static_cast<double>(argmin_on_grid(s.grid, runs.mean_risk())));
    if (std::isfinite(eff.empty() ? std::nan("") : eff.front())) {
      emit_series("max_efficiency", *std::max_element(eff.begin(), eff.end()));
    }
    append_theory_rows(config, s, s.d, runs.theory, config.reps, result.table);
  }
  return result;
}

ResultTable run_theory(const ExperimentConfig& config) {
  config.validate();
  if (config.is_realdata()) {
    throw ConfigError("preset: " + to_string(config.preset) + " has no theory curve");
  }
  ResultTable table;
  for (SeriesSpec& s : config.series()) {
    const ModelConfig model = config.model(s);
    s.d = model.d();
    const theory::TheoryCurve curve = theory::evaluate_curve(model, s.grid, config.constants);
    append_theory_rows(config, s, s.d, curve, 0, table);
  }
  return table;
}

}  // namespace ridgeless
