#include "ridgeless/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "ridgeless/errors.hpp"
#include "ridgeless/format.hpp"

namespace ridgeless {
namespace {

constexpr std::size_t kColumns = 17;

std::string opt_count(const std::optional<std::size_t>& v) {
  return v ? std::to_string(*v) : std::string();
}

std::string opt_real(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

bool same_real(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

bool same_opt(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || same_real(*a, *b);
}

std::size_t need_count(std::string_view field, const char* name) {
  const auto v = parse_integer(field);
  if (!v || *v < 0) throw DataError(std::string("bad ") + name + " field '" + std::string(field) + "'");
  return static_cast<std::size_t>(*v);
}

std::optional<std::size_t> maybe_count(std::string_view field, const char* name) {
  if (field.empty()) return std::nullopt;
  return need_count(field, name);
}

double need_real(std::string_view field, const char* name) {
  const auto v = parse_double(field);
  if (!v) throw DataError(std::string("bad ") + name + " field '" + std::string(field) + "'");
  return *v;
}

std::optional<double> maybe_real(std::string_view field, const char* name) {
  if (field.empty()) return std::nullopt;
  return need_real(field, name);
}

}  // namespace

bool ResultRow::operator==(const ResultRow& o) const {
  return preset == o.preset && n == o.n && d == o.d && M == o.M && F == o.F &&
         same_opt(rho2, o.rho2) && same_opt(eps, o.eps) && same_opt(alpha, o.alpha) &&
         same_opt(snr, o.snr) && same_opt(tau, o.tau) && rep_count == o.rep_count &&
         stat == o.stat && same_real(value, o.value) && same_opt(stderr_, o.stderr_) &&
         valid_flags == o.valid_flags && seed == o.seed && config_hash == o.config_hash;
}

std::string to_csv_line(const ResultRow& r) {
  std::string s;
  s.reserve(160);
  auto put = [&s](const std::string& field) {
    if (!s.empty()) s += ',';
    s += field;
  };
  s = r.preset;
  put(std::to_string(r.n));
  put(std::to_string(r.d));
  put(opt_count(r.M));
  put(opt_count(r.F));
  put(opt_real(r.rho2));
  put(opt_real(r.eps));
  put(opt_real(r.alpha));
  put(opt_real(r.snr));
  put(opt_real(r.tau));
  put(std::to_string(r.rep_count));
  put(r.stat);
  put(format_double(r.value));
  put(opt_real(r.stderr_));
  put(r.valid_flags);
  put(std::to_string(r.seed));
  put(r.config_hash);
  return s;
}

ResultRow parse_csv_line(const std::string& line) {
  const auto f = split_view(line, ',');
  if (f.size() != kColumns) {
    throw DataError("expected " + std::to_string(kColumns) + " fields, got " +
                    std::to_string(f.size()));
  }
  ResultRow r;
  r.preset = std::string(f[0]);
  r.n = need_count(f[1], "n");
  r.d = need_count(f[2], "d");
  r.M = maybe_count(f[3], "M");
  r.F = maybe_count(f[4], "F");
  r.rho2 = maybe_real(f[5], "rho2");
  r.eps = maybe_real(f[6], "eps");
  r.alpha = maybe_real(f[7], "alpha");
  r.snr = maybe_real(f[8], "snr");
  r.tau = maybe_real(f[9], "tau");
  r.rep_count = need_count(f[10], "rep_count");
  r.stat = std::string(f[11]);
  r.value = need_real(f[12], "value");
  r.stderr_ = maybe_real(f[13], "stderr");
  r.valid_flags = std::string(f[14]);
  std::uint64_t seed = 0;
  const auto [ptr, ec] = std::from_chars(f[15].data(), f[15].data() + f[15].size(), seed);
  if (ec != std::errc() || ptr != f[15].data() + f[15].size()) {
    throw DataError("bad seed field '" + std::string(f[15]) + "'");
  }
  r.seed = seed;
  r.config_hash = std::string(f[16]);
  return r;
}

void write_csv(const ResultTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << kCsvHeader << '\n';
  for (const ResultRow& row : table) out << to_csv_line(row) << '\n';
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

ResultTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw DataError(path.string() + ":1: unexpected header");
  }
  ResultTable table;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      table.push_back(parse_csv_line(line));
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return table;
}

std::vector<const ResultRow*> select(const ResultTable& table, const std::string& stat) {
  std::vector<const ResultRow*> out;
  for (const ResultRow& row : table) {
    if (row.stat == stat) out.push_back(&row);
  }
  return out;
}

}  // namespace ridgeless
