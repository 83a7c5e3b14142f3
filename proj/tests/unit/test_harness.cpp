#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ridgeless/config.hpp"
#include "ridgeless/errors.hpp"
#include "ridgeless/experiment.hpp"
#include "ridgeless/output.hpp"
#include "ridgeless/realdata.hpp"
#include "ridgeless/table.hpp"

using namespace ridgeless;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ridgeless_harness_test";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig tiny_sweep() {
  ExperimentConfig c = preset_config(Preset::Custom);
  c.n = 24;
  c.spectrum.kind = SpectrumKind::StrongWeak;
  c.spectrum.dim = 30;
  c.spectrum.num_strong = 6;
  c.spectrum.rho2 = 0.05;
  c.prior.snr = 0.5;
  c.F_values = {6, 12};
  c.reps = 6;
  c.seed = 17;
  return c;
}

std::string require_config_error(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  FAIL("expected ConfigError");
  return {};
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(
      "schema_version = 1\n"
      "; comment\n"
      "preset = fig1_left\n"
      "[run]\nreps = 7\nseed = 18446744073709551615\n"
      "[sweep]\nM = 1,2,4\n"
      "[theory]\nc2 = 2.5\n");
  CHECK(c.preset == Preset::Fig1Left);
  CHECK(c.reps == 7);
  CHECK(c.seed == 18446744073709551615ULL);
  CHECK(c.M_values == std::vector<std::size_t>{1, 2, 4});
  CHECK(c.F_values == std::vector<std::size_t>{100, 150, 200});
  CHECK(c.constants.c2 == 2.5);
  CHECK(c.n == 200);

  CHECK(require_config_error("[run]\nrepz = 3\n").rfind("run.repz", 0) == 0);
  CHECK(require_config_error("[model]\ntau = abc\n").rfind("model.tau", 0) == 0);
  CHECK(require_config_error("schema_version = 2\n").rfind("schema_version", 0) == 0);
  CHECK(require_config_error("preset = fig9\n").rfind("preset", 0) == 0);
  CHECK(require_config_error("[run]\nreps = 0\n").rfind("run.reps", 0) == 0);
  const std::string div = require_config_error("[model]\nn = 200\n[sweep]\nM = 7\n");
  CHECK(div.rfind("sweep.M", 0) == 0);
  CHECK(div.find("largest valid M' <= M is 5") != std::string::npos);
  CHECK_THROWS_AS(load_config(scratch("missing.conf")), ConfigError);
}

TEST_CASE("rounding policy maps M onto divisors") {
  ExperimentConfig c = preset_config(Preset::Fig1Left);
  c.M_values = {1, 7, 20};
  c.m_policy = MPolicy::Round;
  const auto series = c.series();
  CHECK(series.front().grid == std::vector<std::size_t>{1, 8, 20});
  CHECK(series.front().dropped == std::vector<std::size_t>{7});
}

TEST_CASE("config hash covers results-relevant fields only") {
  ExperimentConfig a = tiny_sweep();
  ExperimentConfig b = a;
  b.threads = 8;
  b.output = "elsewhere";
  CHECK(a.hash() == b.hash());
  b.seed += 1;
  CHECK(a.hash() != b.hash());
  CHECK(a.hash().size() == 16);
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("csv round trip") {
  SUBCASE("empty table writes the header only") {
    const fs::path path = scratch("empty.csv");
    write_csv({}, path);
    CHECK(read_file(path) == std::string(kCsvHeader) + "\n");
    CHECK(read_csv(path).empty());
  }
  SUBCASE("sweep table") {
    const SweepResult r = run_sweep(tiny_sweep());
    REQUIRE_FALSE(r.table.empty());
    const fs::path path = scratch("sweep.csv");
    write_csv(r.table, path);
    const ResultTable back = read_csv(path);
    CHECK(back == r.table);
  }
  SUBCASE("malformed rows name the line") {
    const fs::path path = scratch("bad.csv");
    write_file(path, std::string(kCsvHeader) + "\nfoo,1,2\n");
    try {
      (void)read_csv(path);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
  }
}

TEST_CASE("sweeps are deterministic across thread counts") {
  ExperimentConfig c = tiny_sweep();
  const SweepResult one = run_sweep(c);
  c.threads = 4;
  const SweepResult four = run_sweep(c);
  REQUIRE(one.table.size() == four.table.size());
  for (std::size_t i = 0; i < one.table.size(); ++i) {
    CHECK(to_csv_line(one.table[i]) == to_csv_line(four.table[i]));
  }
}

TEST_CASE("sweep rows carry the expected statistics") {
  const SweepResult r = run_sweep(tiny_sweep());
  REQUIRE(r.series.size() == 2);
  const auto eff = select(r.table, "efficiency");
  REQUIRE_FALSE(eff.empty());
  CHECK(eff.front()->M == std::optional<std::size_t>(1));
  CHECK(eff.front()->value == 1.0);
  for (const ResultRow* row : select(r.table, "cond_risk")) {
    CHECK(row->value >= 0.0);
    CHECK(row->F.has_value());
    CHECK(row->snr == std::optional<double>(0.5));
    CHECK_FALSE(row->eps.has_value());
  }
  CHECK(select(r.table, "m_opt_formula").size() == 2);
  CHECK(select(r.table, "total_bound").size() == 2 * r.series[0].spec.grid.size());
}

TEST_CASE("theory-only runs do not sample") {
  ExperimentConfig c = preset_config(Preset::Fig45EigenDecay);
  c.spectrum.infinite = true;
  c.spectrum.trunc_dim = 5000;
  const ResultTable t = run_theory(c);
  CHECK(select(t, "risk").empty());
  CHECK(select(t, "m_opt_formula").size() == 4);
  CHECK_THROWS_AS(run_sweep(c), ConfigError);
}

TEST_CASE("ingest_csv") {
  SUBCASE("toy file is split and centered") {
    const fs::path path = scratch("toy.csv");
    write_file(path, "1,2,3\n3,4,7\n10,0,0\n");
    const RealDataset d = ingest_csv(path, 0, 2);
    CHECK(d.d() == 2);
    CHECK(d.n_train() == 2);
    CHECK(d.n_test() == 1);
    CHECK(d.X_train.colwise().mean().cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(std::abs(d.y_train.mean()) <= 1e-12);
    CHECK(d.feature_mean == Eigen::Vector2d(3, 5));
    CHECK(d.target_mean == 2.0);
    CHECK(d.X_test.row(0) == Eigen::RowVector2d(-3, -5));
    CHECK(d.y_test[0] == 8.0);
  }
  SUBCASE("target column other than the first") {
    const fs::path path = scratch("toy2.csv");
    write_file(path, "2,1\n4,3\n6,5\n");
    const RealDataset d = ingest_csv(path, 1, 2);
    CHECK(d.target_mean == 2.0);
    CHECK(d.feature_mean[0] == 3.0);
  }
  SUBCASE("errors") {
    try {
      (void)ingest_csv(scratch("nope.csv"), 0, 1);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("nope.csv") != std::string::npos);
    }
    const fs::path ragged = scratch("ragged.csv");
    write_file(ragged, "1,2,3\n1,2\n");
    try {
      (void)ingest_csv(ragged, 0, 1);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find(":2: schema error") != std::string::npos);
    }
    const fs::path junk = scratch("junk.csv");
    write_file(junk, "1,2,3\n1,x,3\n");
    try {
      (void)ingest_csv(junk, 0, 1);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find(":2: parse error") != std::string::npos);
    }
    CHECK_THROWS_AS(ingest_csv(junk, 5, 1), DataError);
    write_file(junk, "1,2,3\n");
    CHECK_THROWS_AS(ingest_csv(junk, 0, 2), DataError);
  }
}

TEST_CASE("subsampling is without replacement and seeded") {
  const auto idx = subsample_indices(1000, 400, 5, 2);
  CHECK(std::set<std::size_t>(idx.begin(), idx.end()).size() == 400);
  for (std::size_t i : idx) CHECK(i < 1000);
  CHECK(idx == subsample_indices(1000, 400, 5, 2));
  CHECK(idx != subsample_indices(1000, 400, 5, 3));
  CHECK(subsample_indices(7, 7, 1, 0).size() == 7);
  CHECK_THROWS_AS(subsample_indices(5, 6, 1, 0), ParameterError);
}

TEST_CASE("real-data runs are reproducible") {
  const fs::path path = scratch("synthetic_real.csv");
  {
    std::ofstream out(path);
    for (int i = 0; i < 300; ++i) {
      const double x1 = std::sin(i * 0.37), x2 = std::cos(i * 1.1), x3 = (i % 7) / 7.0;
      out << 2 * x1 - x2 + 0.1 * std::sin(i * 5.0) << ',' << x1 << ',' << x2 << ',' << x3 << '\n';
    }
  }
  ExperimentConfig c = preset_config(Preset::Fig2Left);
  c.realdata.path = path;
  c.realdata.train_rows = 200;
  c.realdata.n_subsample = 30;
  c.M_values = {1, 2, 3, 5};
  c.reps = 1;
  const RealDataResult a = run_realdata(c);
  const RealDataResult b = run_realdata(c);
  CHECK(a.d == 3);
  CHECK(a.n_test == 100);
  REQUIRE(a.table.size() == b.table.size());
  for (std::size_t i = 0; i < a.table.size(); ++i) CHECK(to_csv_line(a.table[i]) == to_csv_line(b.table[i]));
  c.reps = 5;
  c.threads = 3;
  const RealDataResult threaded = run_realdata(c);
  c.threads = 1;
  const RealDataResult serial = run_realdata(c);
  CHECK(threaded.table == serial.table);
  c.realdata.n_subsample = 500;
  CHECK_THROWS_AS(run_realdata(c), ConfigError);
}

TEST_CASE("outputs") {
  const SweepResult r = run_sweep(tiny_sweep());
  Provenance p;
  p.command = "test";
  const auto written = emit_outputs(r.table, scratch("out/tiny.csv"), true, p);
  CHECK(written.size() == 4);
  for (const auto& f : written) CHECK(fs::exists(f));
  CHECK(fs::exists(scratch("out/tiny.svg")));
  CHECK(fs::exists(scratch("out/tiny_bounds.svg")));
  const std::string svg = read_file(scratch("out/tiny.svg"));
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("F=12") != std::string::npos);
  CHECK(read_csv(scratch("out/tiny.csv")) == r.table);
  CHECK(output_stem("a/b.csv") == fs::path("a/b"));
  CHECK(output_stem("a/b") == fs::path("a/b"));
}
