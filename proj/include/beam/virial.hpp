//==============================================================================
// virial.hpp
// Morawetz/Virial actions, their analytic time-derivative right-hand sides,
// cutoff remainder terms, finite-difference identity verification, and the
// drift-envelope reports.
//
// Every right-hand side is the exact torus integration-by-parts expansion of
// the action's time derivative (cross-checked against a central-difference
// derivative of the action series at second order).  Each is split as
//     total = bulk + boundary + momentum
// where `bulk` is the whole-domain (a == 1) form, `boundary` integrates a
// remainder density proportional to (1-a), grad a, or Lap a — identically
// zero wherever the cutoff plateau holds — and `momentum` carries the
// center-motion term (computed always, never assumed away).
//==============================================================================
#pragma once

#include <span>
#include <vector>

#include "beam/solver.hpp"

namespace beam {

// Radial cutoff profile phi: 1 on [0,1], 0 on [2,inf), C^4 polynomial
// transition (the identities involve Lap a but no higher derivative).
double cutoff_profile(double r);
double cutoff_profile_d1(double r);
double cutoff_profile_d2(double r);

// a(x) = phi(|x - y|/R) and its derivatives, tabulated on the grid together
// with the minimal-image displacement z = x - y.  whole_domain gives a == 1
// with vanishing derivatives (z is still centered at y).
struct CutoffFields {
  double R = 0.0;
  bool whole_domain = false;
  std::vector<double> center;
  std::vector<double> a;
  std::vector<std::vector<double>> grad_a;  // per axis
  std::vector<double> lap_a;
  std::vector<std::vector<double>> z;  // per axis
};
CutoffFields make_cutoff(const Grid& g, std::span<const double> center, double R);
CutoffFields make_cutoff_whole_domain(const Grid& g, std::span<const double> center);

// Spectral derivatives of one snapshot, shared by the action evaluations.
struct StateDerivs {
  int dim = 0;
  double dx = 0.0;  // quadrature cell volume
  std::vector<double> u, v, lap;
  std::vector<std::vector<double>> du;               // du[a]
  std::vector<std::vector<std::vector<double>>> d2;  // d2[a][b], a <= b filled
  const std::vector<double>& hess(int a, int b) const {
    return a <= b ? d2[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]
                  : d2[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)];
  }
};
StateDerivs compute_derivs(const EnergyState& s);

// Directional Virial action I2 = integral z_k a(z) d_k u u_t dx for the
// distinguished axis k (0-based; the frame is rotated so Mom is parallel to
// axis 0 and k = 1 is the first orthogonal axis).  Requires dim >= 2.
double action_I2(const StateDerivs& d, const CutoffFields& cf, int axis2 = 1);

// Equirepartition action J = integral a u u_t dx.
double action_J(const StateDerivs& d, const CutoffFields& cf);

// A2 = I2 + J/2 and the total action A = Ia + (n/2) J.
double action_A2(const StateDerivs& d, const CutoffFields& cf, int axis2 = 1);
double action_Ia(const StateDerivs& d, const CutoffFields& cf);
double action_A(const StateDerivs& d, const CutoffFields& cf);

// Rotational action R_ij = integral a u_t (z_j d_i u - z_i d_j u) dx.
double action_Rij(const StateDerivs& d, const CutoffFields& cf, int i, int j);

struct RhsParts {
  double bulk = 0.0;
  double boundary = 0.0;
  double momentum = 0.0;
  double total = 0.0;
};

RhsParts rhs_dJ(const StateDerivs& d, const CutoffFields& cf, const Params& prm,
                std::span<const double> ydot);
RhsParts rhs_dI2(const StateDerivs& d, const CutoffFields& cf, const Params& prm,
                 std::span<const double> ydot, int axis2 = 1);
RhsParts rhs_dA2(const StateDerivs& d, const CutoffFields& cf, const Params& prm,
                 std::span<const double> ydot, int axis2 = 1);
RhsParts rhs_dIa(const StateDerivs& d, const CutoffFields& cf, const Params& prm,
                 std::span<const double> ydot);
RhsParts rhs_dA(const StateDerivs& d, const CutoffFields& cf, const Params& prm,
                std::span<const double> ydot);
RhsParts rhs_dRij(const StateDerivs& d, const CutoffFields& cf, const Params& prm,
                  std::span<const double> ydot, int i, int j);

// Pointwise remainder densities (the integrands behind RhsParts::boundary);
// exposed so tests can assert they vanish identically on the plateau.
std::vector<double> boundary_density_J(const StateDerivs& d, const CutoffFields& cf,
                                       const Params& prm, std::span<const double> ydot);
std::vector<double> boundary_density_I2(const StateDerivs& d, const CutoffFields& cf,
                                        const Params& prm, std::span<const double> ydot,
                                        int axis2 = 1);
std::vector<double> boundary_density_Ia(const StateDerivs& d, const CutoffFields& cf,
                                        const Params& prm, std::span<const double> ydot);
std::vector<double> boundary_density_Rij(const StateDerivs& d, const CutoffFields& cf,
                                         const Params& prm, std::span<const double> ydot,
                                         int i, int j);

// |central difference of the action - rhs| / max(|rhs|, E) on the interior
// samples; endpoints are NaN.  Throws with fewer than three samples.
std::vector<double> identity_residual(std::span<const double> action,
                                      std::span<const double> rhs,
                                      std::span<const double> energy, double h);

// Per-record action evaluation over a trajectory whose states are stored at
// every record.  Fills the virial block of each DiagnosticsRecord.
struct VirialOptions {
  double R = 0.0;              // cutoff radius; <= 0 means whole-domain a == 1
  std::vector<double> center;  // fixed center; empty = follow y_tilde
  bool ydot_from_centers = false;  // central differences of y_tilde, else 0
  int axis2 = 1;
};
void virial_pass(Trajectory& traj, const VirialOptions& opt);

// Envelope fits for the appendix drift structure.  Both are report-level:
// they archive the series and fitted constants, asserting nothing.
struct GrowthReport {
  bool applicable = false;
  std::vector<double> t;
  std::vector<double> y_dot_mom;  // y(t).Mom
  std::vector<double> bulk_cum;   // 2 int_0^t ((Lap u)^2 + c_p |u|^(p+1))
  double C = 0.0, eps = 0.0, slope = 0.0, corr = 0.0;
};
GrowthReport momentum_growth_check(const Trajectory& traj);

struct DriftReport {
  bool applicable = false;
  std::vector<double> t;
  std::vector<double> z_dot_y;
  double C = 0.0, eps = 0.0, slope = 0.0;
};
DriftReport transverse_drift_check(const Trajectory& traj, std::span<const double> Z);

}  // namespace beam
