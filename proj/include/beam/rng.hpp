//==============================================================================
// rng.hpp
// Counter-based random numbers: every value is a pure function of
// (seed, stream, counter), so generation is stateless, order-independent and
// reproducible across platforms.  The mixer is the splitmix64 finalizer.
//==============================================================================
#pragma once

#include <cstdint>

#include "beam/grid.hpp"

namespace beam {

// 64-bit hash of (seed, stream, counter).
std::uint64_t rng_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

// Uniform in [0, 1).
double rng_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

// Standard normal via Box-Muller on two counter values.
double rng_gaussian(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

// Random real field with spectrum restricted to xi_lo <= |xi| <= xi_hi:
// iid Gaussian samples filtered to the annulus, then scaled so the L^2 norm
// equals `l2_norm`.  Returns a physical-representation field.
Field random_annulus_field(const Grid& g, double xi_lo, double xi_hi,
                           double l2_norm, std::uint64_t seed,
                           std::uint64_t stream);

// Ball case xi_lo = 0.
Field random_bandlimited_field(const Grid& g, double xi_max, double l2_norm,
                               std::uint64_t seed, std::uint64_t stream);

}  // namespace beam
