// Command line front end: simulate / sweep / realdata / theory.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "ridgeless/config.hpp"
#include "ridgeless/errors.hpp"
#include "ridgeless/experiment.hpp"
#include "ridgeless/format.hpp"
#include "ridgeless/output.hpp"
#include "ridgeless/realdata.hpp"

namespace {

using namespace ridgeless;

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kDataError = 3, kNumericError = 4 };

struct Options {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<unsigned> threads;
  std::string out;
  bool plot = false;
  std::string data;
  std::optional<std::size_t> M;
  std::optional<std::size_t> train_rows;
  std::optional<std::size_t> target_column;
  std::optional<std::size_t> n_subsample;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "key-value config file")->check(CLI::ExistingFile);
  sub->add_option("--preset", o.preset, "preset name");
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--reps", o.reps, "replications")->check(CLI::PositiveNumber);
  sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--out", o.out, "output path (stem or .csv)");
  sub->add_flag("--plot", o.plot, "also write SVG charts");
}

ExperimentConfig resolve(const Options& o) {
  ExperimentConfig c;
  if (!o.config_path.empty()) {
    if (!o.preset.empty()) throw ConfigError("preset: give either --config or --preset");
    c = load_config(o.config_path);
  } else if (!o.preset.empty()) {
    c = preset_config(parse_preset(o.preset));
  } else {
    c = preset_config(Preset::Custom);
  }
  if (o.seed) c.seed = *o.seed;
  if (o.reps) c.reps = *o.reps;
  if (o.threads) c.threads = *o.threads;
  if (!o.out.empty()) c.output = o.out;
  if (!o.data.empty()) c.realdata.path = o.data;
  if (o.train_rows) c.realdata.train_rows = *o.train_rows;
  if (o.target_column) c.realdata.target_column = *o.target_column;
  if (o.n_subsample) c.realdata.n_subsample = *o.n_subsample;
  c.validate();
  return c;
}

void finish(const ExperimentConfig& c, const ResultTable& table, const Options& o,
            const std::string& command, std::chrono::steady_clock::time_point start) {
  Provenance p;
  p.command = command;
  p.config_canonical = c.canonical();
  p.config_hash = c.hash();
  p.constants = c.constants.describe();
  p.threads = c.threads;
  p.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& path : emit_outputs(table, c.output, o.plot, p)) {
    std::cout << "wrote " << path.string() << '\n';
  }
}

void print_series_summary(const ResultTable& table) {
  for (const ResultRow& row : table) {
    if (row.M) continue;
    std::cout << "  n=" << row.n << " d=" << row.d;
    if (row.F) std::cout << " F=" << *row.F;
    if (row.rho2) std::cout << " rho2=" << format_double(*row.rho2);
    if (row.eps) std::cout << " eps=" << format_double(*row.eps);
    std::cout << "  " << row.stat << " = " << format_double(row.value) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed ridgeless regression laboratory"};
  app.require_subcommand(1);
  Options o;

  CLI::App* simulate = app.add_subcommand("simulate", "one configuration point (M and M=1)");
  add_common(simulate, o);
  simulate->add_option("--M", o.M, "number of machines")->check(CLI::PositiveNumber);

  CLI::App* sweep = app.add_subcommand("sweep", "full sweep over the configured grid");
  add_common(sweep, o);

  CLI::App* realdata = app.add_subcommand("realdata", "subsampled real-data experiment");
  add_common(realdata, o);
  realdata->add_option("--data", o.data, "headerless numeric CSV");
  realdata->add_option("--train-rows", o.train_rows, "rows used for training");
  realdata->add_option("--target-column", o.target_column, "target column index");
  realdata->add_option("--n", o.n_subsample, "training subsample size");

  CLI::App* theory_cmd = app.add_subcommand("theory", "bounds only, no sampling");
  add_common(theory_cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    ExperimentConfig c = resolve(o);
    if (simulate->parsed()) {
      if (c.is_realdata()) throw ConfigError("preset: simulate needs a simulated preset");
      std::size_t M = 0;
      if (o.M) {
        M = *o.M;
      } else if (c.M_values.size() == 1) {
        M = c.M_values.front();
      } else {
        throw ConfigError("sweep.M: simulate needs --M or a single configured M");
      }
      if (c.series().size() != 1) throw ConfigError("sweep: simulate needs a single series");
      c.M_values = M == 1 ? std::vector<std::size_t>{1} : std::vector<std::size_t>{1, M};
      c.validate();
      const SweepResult r = run_sweep(c);
      print_series_summary(r.table);
      finish(c, r.table, o, "simulate", start);
    } else if (sweep->parsed()) {
      const SweepResult r = run_sweep(c);
      print_series_summary(r.table);
      finish(c, r.table, o, "sweep", start);
    } else if (realdata->parsed()) {
      if (!c.is_realdata()) throw ConfigError("preset: realdata needs fig2_left or fig2_right");
      const RealDataResult r = run_realdata(c);
      std::cout << "d=" << r.d << " n_test=" << r.n_test << '\n';
      print_series_summary(r.table);
      finish(c, r.table, o, "realdata", start);
    } else {
      const ResultTable t = run_theory(c);
      print_series_summary(t);
      finish(c, t, o, "theory", start);
    }
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const BoundUndefinedError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
