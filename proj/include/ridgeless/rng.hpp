#pragma once

#include <array>
#include <cstdint>

namespace ridgeless {

/// Philox4x32-10 block function (Salmon et al., Random123). Stateless: the
/// output is a pure function of (counter, key).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

/// What a stream is used for. Distinct purposes never share counters.
enum class StreamPurpose : std::uint32_t {
  Design = 1,
  Beta = 2,
  Noise = 3,
  Subsample = 4,
  Auxiliary = 5,
};

/// Addressable random stream: (seed, rep, purpose, item) selects the stream and
/// the index within it selects the draw. Any draw can be computed
/// independently of every other, so results never depend on thread count or
/// evaluation order.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint32_t rep, StreamPurpose purpose,
               std::uint32_t item) noexcept;

  /// Two independent 53-bit uniforms in (0, 1] taken from block `block`.
  std::array<double, 2> uniform_pair(std::uint32_t block) const noexcept;

  /// The index-th uniform in (0, 1].
  double uniform(std::uint64_t index) const noexcept;

  /// The index-th standard normal (Box-Muller on uniform_pair(index / 2)).
  double normal(std::uint64_t index) const noexcept;

 private:
  PhiloxKey key_;
  std::uint32_t rep_;
  std::uint32_t purpose_;
  std::uint32_t item_;
};

}  // namespace ridgeless
