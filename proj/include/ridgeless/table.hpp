#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ridgeless {

/// Bit-exact CSV header of every result table.
inline constexpr const char* kCsvHeader =
    "preset,n,d,M,F,rho2,eps,alpha,snr,tau,rep_count,stat,value,stderr,valid_flags,seed,"
    "config_hash";

/// One long-format result row; empty optionals serialize as empty fields.
struct ResultRow {
  std::string preset;
  std::size_t n = 0;
  std::size_t d = 0;
  std::optional<std::size_t> M;
  std::optional<std::size_t> F;
  std::optional<double> rho2;
  std::optional<double> eps;
  std::optional<double> alpha;
  std::optional<double> snr;
  std::optional<double> tau;
  std::size_t rep_count = 0;
  std::string stat;
  double value = 0.0;
  std::optional<double> stderr_;
  std::string valid_flags;
  std::uint64_t seed = 0;
  std::string config_hash;

  /// Field-wise equality; NaN values compare equal to NaN.
  bool operator==(const ResultRow& other) const;
};

using ResultTable = std::vector<ResultRow>;

std::string to_csv_line(const ResultRow& row);
ResultRow parse_csv_line(const std::string& line);

void write_csv(const ResultTable& table, const std::filesystem::path& path);
/// Throws DataError on a wrong header or malformed row (with line number).
ResultTable read_csv(const std::filesystem::path& path);

/// Rows matching a statistic name, in table order.
std::vector<const ResultRow*> select(const ResultTable& table, const std::string& stat);

}  // namespace ridgeless
