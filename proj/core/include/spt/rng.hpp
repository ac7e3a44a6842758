#ifndef SPT_RNG_HPP_
#define SPT_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace spt {

using Rng = std::mt19937_64;

// splitmix64 finalizer, used to derive well-separated seeds for sub-streams.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic seed for stream `stream`, element `index`, of a base seed.
// Streams keep pre-train, fine-tune and episode randomness independent so a
// run can be resumed at any iteration without replaying the whole history.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index) {
  return mix64(mix64(base ^ mix64(stream)) ^ index);
}

inline Rng make_rng(std::uint64_t base, std::uint64_t stream,
                    std::uint64_t index) {
  return Rng(derive_seed(base, stream, index));
}

// Uniform draw in [lo, hi). Consumes exactly one engine output.
inline double uniform_real(Rng& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

// Standard normal via the trigonometric Box-Muller transform. Consumes
// exactly two engine outputs and carries no hidden state, so streams stay
// reproducible across checkpoint/resume boundaries.
inline double standard_normal(Rng& rng) {
  const double u1 =
      1.0 - static_cast<double>(rng() >> 11) * 0x1.0p-53;  // (0, 1]
  const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace spt

#endif  // SPT_RNG_HPP_
