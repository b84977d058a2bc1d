#ifndef CHIPLETPLACE_RNG_HPP
#define CHIPLETPLACE_RNG_HPP

// All randomness in a run flows from one 64-bit seed through SplitMix64
// streams; no global entropy sources anywhere.

#include <cmath>
#include <cstdint>

namespace chiplet {

class SplitMix64 {
public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1).
  double uniform() { return ((*this)() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) { return (*this)() % n; }

  // Standard normal via Box-Muller (two uniforms per call, no carry state).
  double gauss() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Derives an independent child stream; distinct `stream` tags give
  // decorrelated sequences for the same seed.
  SplitMix64 split(std::uint64_t stream) const {
    SplitMix64 mixer(state_ ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL));
    return SplitMix64(mixer());
  }

private:
  std::uint64_t state_;
};

} // namespace chiplet

#endif
