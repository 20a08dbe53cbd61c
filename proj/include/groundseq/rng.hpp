// SPDX-License-Identifier: Apache-2.0
//
// Portable deterministic randomness. Every draw that ends up in a dataset
// goes through these helpers so output bytes do not depend on the standard
// library's distribution implementations.
#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <type_traits>

namespace groundseq::rng {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// FNV-1a over the bytes of `s`.
constexpr std::uint64_t hash_bytes(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

constexpr std::uint64_t combine(std::uint64_t h, std::uint64_t v) { return mix64(h ^ mix64(v)); }

/// Keyed counter: a pure function of (seed, parts...).
template <typename... Parts>
constexpr std::uint64_t keyed(std::uint64_t seed, Parts... parts) {
  std::uint64_t h = mix64(seed);
  (
      [&] {
        if constexpr (std::is_convertible_v<Parts, std::string_view>) {
          h = combine(h, hash_bytes(std::string_view(parts)));
        } else {
          h = combine(h, static_cast<std::uint64_t>(parts));
        }
      }(),
      ...);
  return h;
}

/// Top 53 bits mapped onto [0, 1).
constexpr double to_unit(std::uint64_t u) { return static_cast<double>(u >> 11) * 0x1.0p-53; }

/// Sequential generator for sampling loops.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return to_unit(engine_()); }
  std::uint64_t next() { return engine_(); }
  /// Integer in [lo, hi]; modulo bias is negligible for the small ranges used here.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace groundseq::rng
