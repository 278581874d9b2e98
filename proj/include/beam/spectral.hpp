//==============================================================================
// spectral.hpp
// Forward/inverse transforms, frequency-space multipliers, derivative
// helpers, dealiasing, and norm quadrature.
//
// Normalization: the forward transform divides by the total sample count, so
//     fhat(k) = (1/N_tot) * sum_x f(x) exp(-i xi_k . x),
//     f(x)    =            sum_k fhat(k) exp(+i xi_k . x).
// With this convention a constant field c has fhat(0) = c, and Parseval reads
//     integral |f|^2 dx = volume * sum_k |fhat(k)|^2.
// Spatial integrals use the midpoint rule (spectrally accurate for smooth
// periodic integrands), i.e. sum of samples times the cell volume.
//==============================================================================
#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <span>

#include "beam/grid.hpp"

namespace beam {

// Strict direction ops: the representation flag must match the direction.
Field to_spectral(const Field& f);
Field to_physical(const Field& f);

// Convenience conversions: no-ops when already in the requested form.
Field ensure_spectral(const Field& f);
Field ensure_physical(const Field& f);

// Pointwise scaling of the spectral coefficients by sigma(xi).  The input may
// be in either representation; the result is returned in the same one.  A
// real multiplier preserves realness.  sigma must be finite on the lattice.
using Multiplier = std::function<double(std::span<const double>)>;
Field apply_multiplier(const Field& f, const Multiplier& sigma);

// d/dx_axis via i*xi_a (the unpaired Nyquist mode is zeroed).
Field derivative(const Field& f, int axis);
// Laplacian (-|xi|^2) and |xi|^s fractional derivative; s in (-4, 4), and for
// s < 0 the mean mode is zeroed.
Field laplacian(const Field& f);
Field fractional_derivative(const Field& f, double s);

// 2/3-rule spectral truncation.
Field dealias(const Field& f);

// (integral |f|^q dx)^(1/q); q = infinity gives the sup norm.
double lp_norm(const Field& f, double q);
// L^2 norm of |nabla|^s f (homogeneous Sobolev seminorm; plain L^2 at s = 0).
double sobolev_norm(const Field& f, double s);

// Midpoint-rule integral of the samples, and the L^2 pairing <f, g>.
double integrate(const Field& f);
double inner(const Field& f, const Field& g);

inline constexpr double kInfExponent = std::numeric_limits<double>::infinity();

}  // namespace beam
