//==============================================================================
// diagnostics.hpp
// Per-sample functional readout (energies, momenta, S-density), localized
// energy / concentration tracking, S-norm accumulation, and mixed space-time
// norms.
//
// Localized energy follows the unhalved display
//     E0(u, v, y, R) = integral_{B(y,R)} (v^2 + (Lap u)^2 + m u^2) dx,
// so the full-domain value is 2*E0 of the state; every comparison against E0
// in this module carries that factor of two explicitly.
//==============================================================================
#pragma once

#include <limits>
#include <string>
#include <vector>

#include "beam/propagator.hpp"

namespace beam {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One sampled time's functional readout.  The virial block stays NaN unless
// the action pass runs (see virial.hpp).
struct DiagnosticsRecord {
  double t = 0.0;
  double E = kNaN;       // total (nonlinear) energy
  double E0 = kNaN;      // free energy
  std::vector<double> mom;    // momentum vector, size n
  std::vector<double> omega;  // antisymmetric pair scalars, (i<j) lexicographic
  double s_inst = kNaN;  // integral |u|^(p+1) dx at this sample
  double s_cum = kNaN;   // trapezoid cumulative of s_inst (post pass)
  std::vector<double> y;        // concentration center, lifted across wraps
  std::vector<double> y_tilde;  // rate-capped smoothed center
  bool center_jump = false;     // inter-sample jump exceeded L/4

  // Virial columns.
  double I2 = kNaN, J = kNaN, A2 = kNaN;
  double dA2_fd = kNaN, dA2_rhs_bulk = kNaN, dA2_rhs_bnd = kNaN, res_A2 = kNaN;
  double Ia = kNaN, A = kNaN, dA_fd = kNaN, dA_rhs = kNaN, res_A = kNaN;
  std::vector<double> Rij, res_Rij;
};

// Pointwise unhalved energy density v^2 + (Lap u)^2 + m u^2.
Field energy_density(const EnergyState& s, double m);

// Integral of the unhalved density over the periodic ball B(y, R).  R past
// the torus covering radius (half the box diameter) is clamped; *clamped
// reports it.  Result is monotone in R and reaches 2*E0 at full coverage.
double localized_energy(const EnergyState& s, std::span<const double> y, double R,
                        double m, bool* clamped = nullptr);

// sup over grid-point centers of the localized energy, with the argmax.
// Near-ties (within 1e-9 relative) resolve to the smallest flat grid index.
struct ConcentrationSup {
  double value = 0.0;
  std::vector<double> y;
};
ConcentrationSup concentration_sup(const EnergyState& s, double R, double m);

// Smallest radius R on the ladder with lambda(u,v,R) > (1-delta) * 2*E0.
// If no rung qualifies the top rung is returned and *saturated is set.
double concentration_radius(const EnergyState& s, double delta, double m,
                            std::span<const double> ladder,
                            bool* saturated = nullptr);
std::vector<double> default_radius_ladder(const Grid& g, int rungs = 32);

// --- series passes over uniformly-sampled records -------------------------

// Fill record.y: per-sample argmax centers, unwrapped to a continuous lift
// (minimal displacement between consecutive samples); flags jumps > L/4.
void track_center(std::vector<DiagnosticsRecord>& recs, const Grid& g);

// Fill record.y_tilde: moving average of y over `window` samples, then a
// sequential rate cap so |y~(t+h) - y~(t)| / h <= v_cap.
void smooth_center(std::vector<DiagnosticsRecord>& recs, double v_cap, int window);

// Fill record.s_cum by trapezoid accumulation of s_inst.
void s_accumulate(std::vector<DiagnosticsRecord>& recs);

// Integral of s_inst over consecutive windows of tau = k * cadence; computed
// as cumulative differences so window sums telescope exactly.
std::vector<double> window_density(const std::vector<DiagnosticsRecord>& recs,
                                   double tau);

// Mixed space-time norm (integral_I ||u(t)||_{L^b}^a dt)^(1/a) by time
// trapezoid over the stored states; a or b may be infinity.
double mixed_norm(const std::vector<double>& times,
                  const std::vector<EnergyState>& states, double a, double b,
                  double t0, double t1);

// Strichartz admissibility 4/a + n/b <= n/2, and the two dual exponent pairs
// of the inhomogeneous norm (both equal 2(n+2)/(n+4) resp. 2(n+4)/(n+8)).
bool strichartz_admissible(double a, double b, int dim);
std::pair<double, double> dual_norm_exponents_low(int dim);   // 2(n+2)/(n+4)
std::pair<double, double> dual_norm_exponents_high(int dim);  // 2(n+4)/(n+8)

// CSV emission: '#'-prefixed header lines, stable column names, one row per
// record, 17-significant-digit decimal formatting.
std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& recs, int dim,
                            const std::vector<std::string>& header_lines);

}  // namespace beam
