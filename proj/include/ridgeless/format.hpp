#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ridgeless {

/// Shortest decimal that round-trips to the same double ("nan", "inf" for
/// non-finite values).
std::string format_double(double value);

/// Strict parse of a whole field; std::nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

std::vector<std::string_view> split_view(std::string_view text, char sep);
std::string_view trim(std::string_view text);

}  // namespace ridgeless
