//==============================================================================
// propagator.cpp — exact linear flow and energy-space geometry.
//==============================================================================
#include "beam/propagator.hpp"

#include <cmath>
#include <stdexcept>

#include "beam/spectral.hpp"

namespace beam {

void Params::validate() const {
  if (!(m > 0.0)) throw std::invalid_argument("mass constant m must be > 0");
  if (!(p > 1.0)) throw std::invalid_argument("nonlinearity exponent p must be > 1");
}

EnergyState::EnergyState(Field u_, Field v_) : u(std::move(u_)), v(std::move(v_)) {
  require_same_grid(u, v);
}

EnergyState zero_state(const Grid& g) {
  return EnergyState(Field::zeros(g), Field::zeros(g));
}

EnergyState add(const EnergyState& a, const EnergyState& b) {
  return EnergyState(a.u + b.u, a.v + b.v);
}
EnergyState sub(const EnergyState& a, const EnergyState& b) {
  return EnergyState(a.u - b.u, a.v - b.v);
}
EnergyState scale(double c, const EnergyState& a) {
  return EnergyState(c * a.u, c * a.v);
}

double dispersion_omega(double xi_sq, double m) {
  return std::sqrt(xi_sq * xi_sq + m);
}

double group_speed(double xi_sq, double m) {
  if (xi_sq == 0.0) return 0.0;
  return 2.0 * xi_sq * std::sqrt(xi_sq) / dispersion_omega(xi_sq, m);
}

EnergyState evolve_linear(const EnergyState& s, double t, double m) {
  if (!(m > 0.0)) throw std::invalid_argument("mass constant m must be > 0");
  const bool was_physical = s.u.is_physical();
  Field uh = ensure_spectral(s.u);
  Field vh = ensure_spectral(s.v);
  auto& uc = uh.coeffs();
  auto& vc = vh.coeffs();
  s.u.grid().for_each_mode([&](std::size_t flat, std::span<const double> xi,
                               std::span<const int>) {
    double q = 0.0;
    for (double w : xi) q += w * w;
    const double omega = dispersion_omega(q, m);
    const double c = std::cos(t * omega);
    const double sn = std::sin(t * omega);
    const auto u0 = uc[flat];
    const auto v0 = vc[flat];
    uc[flat] = c * u0 + (sn / omega) * v0;
    vc[flat] = -omega * sn * u0 + c * v0;
  });
  if (was_physical) return EnergyState(to_physical(uh), to_physical(vh));
  return EnergyState(std::move(uh), std::move(vh));
}

double free_energy(const EnergyState& s, double m) {
  return 0.5 * energy_inner(s, s, m);
}

double energy_inner(const EnergyState& a, const EnergyState& b, double m) {
  if (!(m > 0.0)) throw std::invalid_argument("mass constant m must be > 0");
  require_same_grid(a.u, b.u);
  const Field lap_a = ensure_physical(laplacian(a.u));
  const Field lap_b = ensure_physical(laplacian(b.u));
  const Field au = ensure_physical(a.u);
  const Field bu = ensure_physical(b.u);
  const Field av = ensure_physical(a.v);
  const Field bv = ensure_physical(b.v);
  const auto& la = lap_a.samples();
  const auto& lb = lap_b.samples();
  const auto& ua = au.samples();
  const auto& ub = bu.samples();
  const auto& va = av.samples();
  const auto& vb = bv.samples();
  double acc = 0.0;
  for (std::size_t i = 0; i < ua.size(); ++i)
    acc += va[i] * vb[i] + la[i] * lb[i] + m * ua[i] * ub[i];
  return acc * a.u.grid().cell_volume();
}

double group_velocity_max(const Grid& g, double m) {
  if (!(m > 0.0)) throw std::invalid_argument("mass constant m must be > 0");
  double vmax = 0.0;
  g.for_each_mode([&](std::size_t, std::span<const double> xi,
                      std::span<const int> k) {
    if (g.mode_dealiased(k)) return;
    double q = 0.0;
    for (double w : xi) q += w * w;
    vmax = std::max(vmax, group_speed(q, m));
  });
  return vmax;
}

}  // namespace beam
