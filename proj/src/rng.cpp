#include "hdboot/rng.hpp"

#include <cmath>
#include <numbers>

namespace hdboot {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) noexcept {
  const std::uint64_t product = std::uint64_t{a} * std::uint64_t{b};
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter c, PhiloxKey k) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kPhiloxW0;
      k[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t part : path) {
    h = mix64(h ^ mix64(part + 0x632be59bd9b4e019ULL));
  }
  return h;
}

Stream::Stream(std::uint64_t seed, StreamTag tag, std::uint64_t index) noexcept {
  const std::uint64_t k =
      derive_seed(seed, {static_cast<std::uint64_t>(tag)});
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  counter_[0] = static_cast<std::uint32_t>(index);
  counter_[1] = static_cast<std::uint32_t>(index >> 32);
}

void Stream::refill() noexcept {
  counter_[2] = static_cast<std::uint32_t>(block_);
  counter_[3] = static_cast<std::uint32_t>(block_ >> 32);
  ++block_;
  const PhiloxCounter out = philox4x32(counter_, key_);
  buffer_[0] = (std::uint64_t{out[0]} << 32) | out[1];
  buffer_[1] = (std::uint64_t{out[2]} << 32) | out[3];
  used_ = 0;
}

std::uint64_t Stream::next_u64() noexcept {
  if (used_ == 2) refill();
  return buffer_[used_++];
}

double Stream::uniform() noexcept {
  // Midpoint of one of 2^53 equal cells, so 0 and 1 are never returned.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::normal() noexcept {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

double Stream::gamma(double shape) noexcept {
  if (shape < 1.0) {
    // Boost to shape + 1 and rescale by U^(1/shape).
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  const double dd = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * dd);
  for (;;) {
    double z, v;
    do {
      z = normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * z * z * z * z) return dd * v;
    if (std::log(u) < 0.5 * z * z + dd * (1.0 - v + std::log(v))) return dd * v;
  }
}

}  // namespace hdboot
