//==============================================================================
// rng.cpp — counter-based generator and random field synthesis.
//==============================================================================
#include "beam/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "beam/spectral.hpp"

namespace beam {

std::uint64_t rng_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  // splitmix64 finalizer applied to a combined word; the odd constants keep
  // the three inputs from commuting.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1) +
                    0xbf58476d1ce4e5b9ULL * (counter + 1);
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

double rng_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return static_cast<double>(rng_hash(seed, stream, counter) >> 11) * 0x1.0p-53;
}

double rng_gaussian(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  const double u1 = rng_uniform(seed, stream, 2 * counter);
  const double u2 = rng_uniform(seed, stream, 2 * counter + 1);
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

Field random_annulus_field(const Grid& g, double xi_lo, double xi_hi,
                           double l2_norm, std::uint64_t seed,
                           std::uint64_t stream) {
  if (!(xi_hi > 0.0) || xi_lo < 0.0 || xi_lo >= xi_hi)
    throw std::invalid_argument("annulus must satisfy 0 <= xi_lo < xi_hi");
  Field f(g, Rep::physical);
  auto& s = f.samples();
  for (std::size_t i = 0; i < s.size(); ++i)
    s[i] = rng_gaussian(seed, stream, static_cast<std::uint64_t>(i));
  f = apply_multiplier(f, [xi_lo, xi_hi](std::span<const double> xi) {
    double q = 0.0;
    for (double v : xi) q += v * v;
    return (q >= xi_lo * xi_lo && q <= xi_hi * xi_hi) ? 1.0 : 0.0;
  });
  const double norm = lp_norm(f, 2.0);
  if (norm > 0.0 && l2_norm > 0.0) f *= l2_norm / norm;
  if (l2_norm == 0.0) f *= 0.0;
  return f;
}

Field random_bandlimited_field(const Grid& g, double xi_max, double l2_norm,
                               std::uint64_t seed, std::uint64_t stream) {
  return random_annulus_field(g, 0.0, xi_max, l2_norm, seed, stream);
}

}  // namespace beam
