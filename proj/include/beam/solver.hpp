//==============================================================================
// solver.hpp
// Strang-split time integration of
//     u_tt + Lap^2 u + m u + lambda |u|^(p-1) u = 0
// and the conserved functionals (energy, momentum, antisymmetric pairs).
//
// The splitting composes the exact linear multiplier flow with the exactly
// solvable nonlinear partial flow (u fixed, v <- v - tau lambda |u|^(p-1) u),
// so operator splitting is the only time-discretization error (second
// order).  The 2/3-rule truncation is applied to u before the nonlinearity
// is evaluated and to the result; for non-integer p the nonlinearity is not
// band-limited and aliasing is mitigated rather than eliminated — the
// conservation checks are the guard.
//==============================================================================
#pragma once

#include <functional>

#include "beam/diagnostics.hpp"
#include "beam/propagator.hpp"

namespace beam {

// Exact nonlinear partial flow over time tau (u unchanged, pointwise
// |u|^(p-1) u = sign(u)|u|^p so any real p > 1 is accepted).  Throws if
// |u|^p overflows, reporting the offending max |u|.
EnergyState nonlinear_substep(const EnergyState& s, double tau, const Params& prm);

// evolve_linear(dt/2) o nonlinear_substep(dt) o evolve_linear(dt/2).
// With lambda = 0 the substep is the identity and the step collapses to the
// exact linear flow, applied as a single multiplier.
EnergyState strang_step(const EnergyState& s, double dt, const Params& prm);

// E = E0 + lambda/(p+1) ||u||_{p+1}^{p+1}.
double total_energy(const EnergyState& s, const Params& prm);

// Mom_i = integral v du/dx_i dx.
std::vector<double> momentum(const EnergyState& s);

// Antisymmetric pairing of the conserved flux components: the (i,j) scalar is
// Mom_i - Mom_j (zero for radial data, conserved along the flow).  i must
// differ from j and the grid must be at least two-dimensional.
double angular_momentum(const EnergyState& s, int i, int j);
// All pairs i < j in lexicographic order, from a precomputed momentum.
std::vector<double> omega_pairs(const std::vector<double>& mom);

// Wrap-around budget: the dispersive group velocity is unbounded in
// frequency, so the horizon must satisfy 2 * v_max * T <= min L.
struct BudgetCheck {
  double vmax = 0.0;
  double spread = 0.0;  // 2 * vmax * T
  double limit = 0.0;   // min box side
  bool ok = false;
};
BudgetCheck check_wraparound(const Grid& g, double m, double T);

struct SimOptions {
  double dt = 1e-3;
  double T = 1.0;
  int record_stride = 10;  // diagnostics every this many steps
  int state_stride = 1;    // keep the full state every this many records
                           // (0 = first and last record only)
  bool concentration = false;  // fill record centers (argmax of localized E)
  double concentration_R = 1.0;
  std::function<Field(double)> forcing;  // optional velocity forcing e(t)
};

struct Trajectory {
  Params params;
  double dt = 0.0;
  double record_dt = 0.0;
  std::vector<DiagnosticsRecord> records;
  std::vector<double> state_times;
  std::vector<EnergyState> states;

  const EnergyState& state_at(double t) const;  // throws if t is not stored
  const EnergyState& final_state() const;
};

// Fixed-step march from t = 0 to T.  T must be an integer multiple of dt and
// the step count a multiple of record_stride.  Deterministic for a fixed
// configuration.  No wrap-around budget enforcement at this level; the
// config-driven runner refuses over-budget horizons (see config.hpp).
Trajectory simulate(const EnergyState& init, const Params& prm, const SimOptions& opt);

// One record's scalar block (E, E0, mom, omega pairs, s_inst, optional center).
DiagnosticsRecord make_record(const EnergyState& s, double t, const Params& prm,
                              bool concentration = false, double R = 1.0);

}  // namespace beam
