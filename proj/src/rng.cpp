#include "ridgeless/rng.hpp"

#include <cmath>
#include <numbers>

namespace ridgeless {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) noexcept {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

inline double to_unit_interval(std::uint32_t high, std::uint32_t low) noexcept {
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(high) << 32) | low) >> 11;
  // (bits + 1) * 2^-53 lies in (0, 1], so log() below is always finite.
  return static_cast<double>(bits + 1) * 0x1.0p-53;
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint32_t rep,
                           StreamPurpose purpose, std::uint32_t item) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      rep_(rep),
      purpose_(static_cast<std::uint32_t>(purpose)),
      item_(item) {}

std::array<double, 2> RandomStream::uniform_pair(std::uint32_t block) const noexcept {
  const PhiloxCounter out = philox4x32_10({block, item_, purpose_, rep_}, key_);
  return {to_unit_interval(out[0], out[1]), to_unit_interval(out[2], out[3])};
}

double RandomStream::uniform(std::uint64_t index) const noexcept {
  return uniform_pair(static_cast<std::uint32_t>(index / 2))[index % 2];
}

double RandomStream::normal(std::uint64_t index) const noexcept {
  const auto [u1, u2] = uniform_pair(static_cast<std::uint32_t>(index / 2));
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return index % 2 == 0 ? radius * std::cos(angle) : radius * std::sin(angle);
}

}  // namespace ridgeless
