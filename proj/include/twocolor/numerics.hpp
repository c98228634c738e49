#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

namespace twocolor {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
// Vacuum speed of light in nm/s (wavelengths are carried in nm throughout).
inline constexpr double kSpeedOfLightNmPerS = 2.99792458e17;

// Bracketed scalar root finding (Brent). Requires f(a) and f(b) of opposite
// sign; converges to |interval| <= xtol or |f| <= ftol.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double xtol, double ftol = 0.0, int max_iter = 200);

// Golden-section minimization of a unimodal scalar function on [a, b].
double golden_min(const std::function<double(double)>& f, double a, double b,
                  double xtol, int max_iter = 400);

// Composite Simpson integration of f over [a, b] with n subintervals
// (n rounded up to even).
double simpson(const std::function<double(double)>& f, double a, double b,
               int n);

// splitmix64: tiny, well-mixed 64-bit hash; used to derive independent RNG
// substreams from (seed, index) so sweep points are order-independent.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x9E3779B97F4A7C15ULL));
}

// FNV-1a 64-bit hash, used for data-file provenance stamps.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xCBF29CE484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace twocolor
