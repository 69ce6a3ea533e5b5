#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace lpa::rng {

// Counter-based randomness: every random quantity is a pure function of
// (key, counter), so results never depend on evaluation order or threading.

inline constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a child key from a parent key and a path of integers.
constexpr std::uint64_t derive(std::uint64_t key,
                               std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(key + golden_gamma);
  for (std::uint64_t p : path) {
    h = mix64(h ^ mix64(p + golden_gamma));
  }
  return h;
}

/// Uniform in (0, 1], 53-bit resolution.
constexpr double unit_open_closed(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// The i-th 64-bit output of the stream identified by `key`.
constexpr std::uint64_t at(std::uint64_t key, std::uint64_t i) noexcept {
  return mix64(key + (i + 1) * golden_gamma);
}

inline double exponential_at(std::uint64_t key, std::uint64_t i) noexcept {
  return -std::log(unit_open_closed(at(key, i)));
}

/// Standard normal via Box-Muller on counters (2i, 2i+1).
inline double normal_at(std::uint64_t key, std::uint64_t i) noexcept {
  constexpr double two_pi = 6.283185307179586476925286766559;
  const double u1 = unit_open_closed(at(key, 2 * i));
  const double u2 = unit_open_closed(at(key, 2 * i + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace lpa::rng
