#include "nlwlab/counter_rng.hpp"

#include <cmath>
#include <numbers>

namespace nlwlab {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t keyed_bits(const DrawKey& key, std::initializer_list<std::uint64_t> counters) noexcept {
  std::uint64_t h = mix64(key.master_seed ^ 0x6a09e667f3bcc909ULL);
  h = mix64(h ^ mix64(key.sample_index + 0xbb67ae8584caa73bULL));
  std::uint64_t lane = 0x3c6ef372fe94f82bULL;
  for (std::uint64_t c : counters) {
    lane += 0xa54ff53a5f1d36f1ULL;
    h = mix64(h ^ mix64(c + lane));
  }
  return h;
}

double keyed_uniform(const DrawKey& key, std::initializer_list<std::uint64_t> counters) noexcept {
  const std::uint64_t bits = keyed_bits(key, counters) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double keyed_normal(const DrawKey& key, std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
  const double u1 = keyed_uniform(key, {a, b, c, 0});
  const double u2 = keyed_uniform(key, {a, b, c, 1});
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace nlwlab
