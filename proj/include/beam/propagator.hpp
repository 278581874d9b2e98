//==============================================================================
// propagator.hpp
// The energy space (u, v) = (u, u_t), physical constants, and the exact
// linear flow of u_tt + Lap^2 u + m u = 0 as a Fourier multiplier group.
//
// Diagonalizing in frequency gives omega(xi) = sqrt(|xi|^4 + m) and
//     uhat(t) =  cos(t w) uhat0 + (sin(t w)/w) vhat0
//     vhat(t) = -w sin(t w) uhat0 +  cos(t w)  vhat0.
// Since m > 0, omega >= sqrt(m) > 0 and sin(t w)/w needs no series fallback.
// The flow is applied as one exact multiplier step per call; there is never
// any time-stepping error in the linear part.
//==============================================================================
#pragma once

#include <vector>

#include "beam/grid.hpp"

namespace beam {

// Physical constants of u_tt + Lap^2 u + m u + lambda |u|^(p-1) u = 0.
struct Params {
  double m = 1.0;       // mass, > 0
  double lambda = 1.0;  // coupling; > 0 defocusing, 0 linear
  double p = 3.0;       // nonlinearity exponent, > 1

  void validate() const;
  // Critical regularity s = n(p-1)/(2(p+1)) of the Sobolev embedding
  // H^s -> L^(p+1) for the given spatial dimension.
  double sobolev_index(int dim) const { return dim * (p - 1.0) / (2.0 * (p + 1.0)); }
};

// A point of the energy space: displacement u and velocity v = u_t.
struct EnergyState {
  Field u;
  Field v;

  EnergyState(Field u_, Field v_);
  const Grid& grid() const { return u.grid(); }
};

EnergyState zero_state(const Grid& g);
EnergyState add(const EnergyState& a, const EnergyState& b);
EnergyState sub(const EnergyState& a, const EnergyState& b);
EnergyState scale(double c, const EnergyState& a);

double dispersion_omega(double xi_sq, double m);

// |grad omega| = 2 |xi|^3 / omega at squared wavenumber xi_sq.
double group_speed(double xi_sq, double m);

// Exact linear evolution by time t (any sign).  Group law and free-energy
// isometry hold to roundoff.
EnergyState evolve_linear(const EnergyState& s, double t, double m);

// E0(u,v) = 1/2 * integral (v^2 + (Lap u)^2 + m u^2) dx, and the associated
// bilinear form; E0(x) = 1/2 <x, x>_E.
double free_energy(const EnergyState& s, double m);
double energy_inner(const EnergyState& a, const EnergyState& b, double m);

// Max |grad omega| = 2|xi|^3 / omega over the 2/3-dealiased lattice; used to
// budget the periodic-box horizon against wrap-around.
double group_velocity_max(const Grid& g, double m);

}  // namespace beam
