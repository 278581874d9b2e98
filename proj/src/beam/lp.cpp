//==============================================================================
// lp.cpp — dyadic frequency projectors.
//==============================================================================
#include "beam/lp.hpp"

#include <cmath>
#include <stdexcept>

#include "beam/spectral.hpp"

namespace beam {

double lp_bump(double r) {
  r = std::abs(r);
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double t = r - 1.0;  // in (0,1)
  const double s = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));  // quintic smoothstep
  return 1.0 - s;
}

double lp_band_weight(double r) { return lp_bump(r) - lp_bump(2.0 * r); }

std::pair<double, double> resolvable_band(const Grid& g) {
  const double lo = std::exp2(std::floor(std::log2(g.min_wavenumber())));
  const double hi = std::exp2(std::ceil(std::log2(2.0 * g.max_wavenumber())));
  return {lo, hi};
}

std::vector<double> dyadic_ladder(const Grid& g) {
  auto [lo, hi] = resolvable_band(g);
  std::vector<double> out;
  for (double n = lo; n <= hi * 1.0000000001; n *= 2.0) out.push_back(n);
  return out;
}

Field lp_project(const Field& f, double N, LpKind kind, LpNote* note) {
  if (!(N > 0.0)) throw std::invalid_argument("dyadic scale must be positive");
  auto [lo, hi] = resolvable_band(f.grid());
  double used = N;
  if (N < lo) used = lo;
  if (N > hi) used = hi;
  if (note) {
    note->clamped = used != N;
    note->requested = N;
    note->used = used;
  }
  const double scale = used;
  switch (kind) {
    case LpKind::band:
      return apply_multiplier(f, [scale](std::span<const double> xi) {
        double q = 0.0;
        for (double v : xi) q += v * v;
        return lp_band_weight(std::sqrt(q) / scale);
      });
    case LpKind::leq:
      return apply_multiplier(f, [scale](std::span<const double> xi) {
        double q = 0.0;
        for (double v : xi) q += v * v;
        return lp_bump(std::sqrt(q) / scale);
      });
    case LpKind::gt:
      return apply_multiplier(f, [scale](std::span<const double> xi) {
        double q = 0.0;
        for (double v : xi) q += v * v;
        return 1.0 - lp_bump(std::sqrt(q) / scale);
      });
  }
  throw std::logic_error("unreachable");
}

}  // namespace beam
