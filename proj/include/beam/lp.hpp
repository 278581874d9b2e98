//==============================================================================
// lp.hpp
// Littlewood-Paley projectors on the dyadic ladder.
//
// The radial bump psi is 1 on [0,1], 0 on [2,inf), with a C^2 quintic
// smoothstep transition on (1,2).  Band N keeps psi(|xi|/N) - psi(2|xi|/N);
// the low-pass keeps psi(|xi|/N); the high-pass keeps 1 - psi(|xi|/N), so
// P_{<=N} + P_{>N} = identity exactly.  Summed over the resolvable dyadic
// ladder the band weights telescope to 1 at every nonzero lattice mode.
//==============================================================================
#pragma once

#include <utility>
#include <vector>

#include "beam/grid.hpp"

namespace beam {

// The radial profile psi(r) and the band weight psi(r) - psi(2r).
double lp_bump(double r);
double lp_band_weight(double r);

enum class LpKind { band, leq, gt };

// Provenance note for out-of-range requests: N is clamped into the
// resolvable ladder and the operation proceeds.
struct LpNote {
  bool clamped = false;
  double requested = 0.0;
  double used = 0.0;
};

// Dyadic range [N_lo, N_hi] resolvable on the grid: N_lo is the largest
// power of two <= the smallest nonzero |xi|, N_hi the smallest power of two
// >= twice the lattice corner |xi| (so the ladder telescopes to a full
// partition of unity on every nonzero mode).
std::pair<double, double> resolvable_band(const Grid& g);
std::vector<double> dyadic_ladder(const Grid& g);

Field lp_project(const Field& f, double N, LpKind kind, LpNote* note = nullptr);

}  // namespace beam
