#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace hdboot {

/// Philox4x32-10 block function (Salmon et al., Random123).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key) noexcept;

/// splitmix64 finalizer; used to fold structured identifiers into keys.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a child seed from a parent seed and a path of identifiers.
/// derive_seed(s, {a, b}) != derive_seed(s, {b, a}).
std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> path) noexcept;

/// Purpose tags keep streams used for different roles disjoint.
enum class StreamTag : std::uint64_t {
  PredictorInnovation = 1,
  ErrorInnovation = 2,
  ReplacementInnovation = 3,
  TestMultiplier = 4,
  SigmaMultiplier = 5,
  Coupling = 6,
  Experiment = 7,
  Auxiliary = 8,
  Generic = 9,
};

/// A counter-based random stream addressed by (seed, tag, index).
///
/// Two streams with the same address produce identical sequences and
/// streams with different addresses are statistically independent.  The
/// index is typically a time index or a bootstrap draw number, so any
/// single innovation can be recomputed without replaying the others.
class Stream {
 public:
  Stream(std::uint64_t seed, StreamTag tag, std::uint64_t index) noexcept;

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;
  /// Standard normal via Box-Muller.
  double normal() noexcept;
  /// Gamma(shape, 1), shape > 0 (Marsaglia-Tsang).
  double gamma(double shape) noexcept;
  /// Chi-squared with df degrees of freedom.
  double chi_squared(double df) noexcept { return 2.0 * gamma(0.5 * df); }

  std::uint64_t next_u64() noexcept;

 private:
  void refill() noexcept;

  PhiloxKey key_{};
  PhiloxCounter counter_{};
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int used_ = 2;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace hdboot
