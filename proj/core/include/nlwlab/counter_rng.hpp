#pragma once

#include <cstdint>
#include <initializer_list>

namespace nlwlab {

/// Identifies one realization omega of an ensemble.
struct DrawKey {
  std::uint64_t master_seed = 0;
  std::uint64_t sample_index = 0;

  friend bool operator==(const DrawKey&, const DrawKey&) = default;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Stateless keyed generator: every variate is a pure function of the draw key
/// and a list of counters, so samples can be produced in any order on any
/// number of workers.
std::uint64_t keyed_bits(const DrawKey& key, std::initializer_list<std::uint64_t> counters) noexcept;

/// Uniform variate in the open interval (0, 1).
double keyed_uniform(const DrawKey& key, std::initializer_list<std::uint64_t> counters) noexcept;

/// Standard normal variate (Box-Muller on two keyed uniforms).
double keyed_normal(const DrawKey& key, std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept;

}  // namespace nlwlab
