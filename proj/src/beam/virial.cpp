//==============================================================================
// virial.cpp — actions, exact right-hand sides, residuals, envelope fits.
//==============================================================================
#include "beam/virial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "beam/spectral.hpp"

namespace beam {

namespace {

// C^4 smoothstep s(t) on [0,1]: s(0)=0, s(1)=1, s'..s'''' vanish at both ends.
double smooth01(double t) {
  return t * t * t * t * t * (126.0 + t * (-420.0 + t * (540.0 + t * (-315.0 + 70.0 * t))));
}
double smooth01_d1(double t) {
  const double a = t * (1.0 - t);
  return 630.0 * a * a * a * a;
}
double smooth01_d2(double t) {
  const double a = t * (1.0 - t);
  return 2520.0 * a * a * a * (1.0 - 2.0 * t);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> zero_vec(int n) {
  return std::vector<double>(static_cast<std::size_t>(n), 0.0);
}

void check_pair(const StateDerivs& d, int i, int j) {
  if (d.dim < 2) throw std::invalid_argument("directional actions need dimension >= 2");
  if (i == j) throw std::invalid_argument("pair indices must differ");
  if (i < 0 || j < 0 || i >= d.dim || j >= d.dim)
    throw std::invalid_argument("axis index out of range");
}

}  // namespace

double cutoff_profile(double r) {
  r = std::abs(r);
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  return 1.0 - smooth01(r - 1.0);
}
double cutoff_profile_d1(double r) {
  r = std::abs(r);
  if (r <= 1.0 || r >= 2.0) return 0.0;
  return -smooth01_d1(r - 1.0);
}
double cutoff_profile_d2(double r) {
  r = std::abs(r);
  if (r <= 1.0 || r >= 2.0) return 0.0;
  return -smooth01_d2(r - 1.0);
}

CutoffFields make_cutoff(const Grid& g, std::span<const double> center, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("cutoff radius must be positive");
  if (static_cast<int>(center.size()) != g.dim())
    throw std::invalid_argument("cutoff center dimension mismatch");
  CutoffFields cf;
  cf.R = R;
  cf.whole_domain = false;
  cf.center.assign(center.begin(), center.end());
  const std::size_t n = g.size();
  const int dim = g.dim();
  cf.a.resize(n);
  cf.lap_a.resize(n);
  cf.grad_a.assign(static_cast<std::size_t>(dim), std::vector<double>(n));
  cf.z.assign(static_cast<std::size_t>(dim), std::vector<double>(n));
  g.for_each_point([&](std::size_t flat, std::span<const double> x) {
    double q = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double za = g.min_image(a, x[a] - center[static_cast<std::size_t>(a)]);
      cf.z[static_cast<std::size_t>(a)][flat] = za;
      q += za * za;
    }
    const double r = std::sqrt(q);
    const double s = r / R;
    cf.a[flat] = cutoff_profile(s);
    const double d1 = cutoff_profile_d1(s);
    if (d1 == 0.0) {
      for (int a = 0; a < dim; ++a) cf.grad_a[static_cast<std::size_t>(a)][flat] = 0.0;
      cf.lap_a[flat] = cutoff_profile_d2(s) / (R * R);
    } else {
      // r > R here, so the division is safe.
      for (int a = 0; a < dim; ++a)
        cf.grad_a[static_cast<std::size_t>(a)][flat] =
            d1 * cf.z[static_cast<std::size_t>(a)][flat] / (R * r);
      cf.lap_a[flat] =
          cutoff_profile_d2(s) / (R * R) + d1 * (dim - 1) / (R * r);
    }
  });
  return cf;
}

CutoffFields make_cutoff_whole_domain(const Grid& g, std::span<const double> center) {
  if (static_cast<int>(center.size()) != g.dim())
    throw std::invalid_argument("cutoff center dimension mismatch");
  CutoffFields cf;
  cf.R = 0.0;
  cf.whole_domain = true;
  cf.center.assign(center.begin(), center.end());
  const std::size_t n = g.size();
  const int dim = g.dim();
  cf.a.assign(n, 1.0);
  cf.lap_a.assign(n, 0.0);
  cf.grad_a.assign(static_cast<std::size_t>(dim), std::vector<double>(n, 0.0));
  cf.z.assign(static_cast<std::size_t>(dim), std::vector<double>(n));
  g.for_each_point([&](std::size_t flat, std::span<const double> x) {
    for (int a = 0; a < dim; ++a)
      cf.z[static_cast<std::size_t>(a)][flat] =
          g.min_image(a, x[a] - center[static_cast<std::size_t>(a)]);
  });
  return cf;
}

StateDerivs compute_derivs(const EnergyState& s) {
  StateDerivs d;
  const Grid& g = s.grid();
  d.dim = g.dim();
  d.dx = g.cell_volume();
  d.u = ensure_physical(s.u).samples();
  d.v = ensure_physical(s.v).samples();
  const Field uspec = ensure_spectral(s.u);
  d.lap = to_physical(laplacian(uspec)).samples();
  d.du.reserve(static_cast<std::size_t>(d.dim));
  for (int a = 0; a < d.dim; ++a)
    d.du.push_back(to_physical(derivative(uspec, a)).samples());
  d.d2.resize(static_cast<std::size_t>(d.dim));
  for (int a = 0; a < d.dim; ++a) {
    d.d2[static_cast<std::size_t>(a)].resize(static_cast<std::size_t>(d.dim));
    for (int b = a; b < d.dim; ++b) {
      Field h = apply_multiplier(uspec, [a, b](std::span<const double> xi) {
        return -xi[a] * xi[b];
      });
      d.d2[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          to_physical(h).samples();
    }
  }
  return d;
}

double action_I2(const StateDerivs& d, const CutoffFields& cf, int axis2) {
  check_pair(d, 0, axis2);
  const auto& z2 = cf.z[static_cast<std::size_t>(axis2)];
  const auto& d2u = d.du[static_cast<std::size_t>(axis2)];
  double acc = 0.0;
  for (std::size_t i = 0; i < d.u.size(); ++i)
    acc += z2[i] * cf.a[i] * d2u[i] * d.v[i];
  return acc * d.dx;
}

double action_J(const StateDerivs& d, const CutoffFields& cf) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d.u.size(); ++i) acc += cf.a[i] * d.u[i] * d.v[i];
  return acc * d.dx;
}

double action_A2(const StateDerivs& d, const CutoffFields& cf, int axis2) {
  return action_I2(d, cf, axis2) + 0.5 * action_J(d, cf);
}

double action_Ia(const StateDerivs& d, const CutoffFields& cf) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d.u.size(); ++i) {
    double zgrad = 0.0;
    for (int a = 0; a < d.dim; ++a)
      zgrad += cf.z[static_cast<std::size_t>(a)][i] * d.du[static_cast<std::size_t>(a)][i];
    acc += cf.a[i] * zgrad * d.v[i];
  }
  return acc * d.dx;
}

double action_A(const StateDerivs& d, const CutoffFields& cf) {
  return action_Ia(d, cf) + 0.5 * d.dim * action_J(d, cf);
}

double action_Rij(const StateDerivs& d, const CutoffFields& cf, int i, int j) {
  check_pair(d, i, j);
  const auto& zi = cf.z[static_cast<std::size_t>(i)];
  const auto& zj = cf.z[static_cast<std::size_t>(j)];
  const auto& dui = d.du[static_cast<std::size_t>(i)];
  const auto& duj = d.du[static_cast<std::size_t>(j)];
  double acc = 0.0;
  for (std::size_t k = 0; k < d.u.size(); ++k)
    acc += cf.a[k] * d.v[k] * (zj[k] * dui[k] - zi[k] * duj[k]);
  return acc * d.dx;
}

//------------------------------------------------------------------------------
// Right-hand sides.  Each boundary density carries only (1-a), grad a, Lap a
// factors; bulk terms are the whole-domain forms.
//------------------------------------------------------------------------------

std::vector<double> boundary_density_J(const StateDerivs& d, const CutoffFields& cf,
                                       const Params& prm, std::span<const double> ydot) {
  std::vector<double> out(d.u.size());
  const double cnl = prm.lambda;
  for (std::size_t i = 0; i < d.u.size(); ++i) {
    const double up1 = std::pow(std::abs(d.u[i]), prm.p + 1.0);
    const double quad = d.v[i] * d.v[i] - d.lap[i] * d.lap[i] -
                        prm.m * d.u[i] * d.u[i] - cnl * up1;
    double grad_term = 0.0;
    double ydot_grad = 0.0;
    for (int a = 0; a < d.dim; ++a) {
      grad_term += cf.grad_a[static_cast<std::size_t>(a)][i] *
                   d.du[static_cast<std::size_t>(a)][i];
      ydot_grad += ydot[static_cast<std::size_t>(a)] *
                   cf.grad_a[static_cast<std::size_t>(a)][i];
    }
    out[i] = (cf.a[i] - 1.0) * quad - cf.lap_a[i] * d.u[i] * d.lap[i] -
             2.0 * grad_term * d.lap[i] - ydot_grad * d.u[i] * d.v[i];
  }
  return out;
}

RhsParts rhs_dJ(const StateDerivs& d, const CutoffFields& cf, const Params& prm,
                std::span<const double> ydot) {
  RhsParts r;
  double bulk = 0.0;
  for (std::size_t i = 0; i < d.u.size(); ++i) {
    const double up1 = std::pow(std::abs(d.u[i]), prm.p + 1.0);
    bulk += d.v[i] * d.v[i] - d.lap[i] * d.lap[i] - prm.m * d.u[i] * d.u[i] -
            prm.lambda * up1;
  }
  r.bulk = bulk * d.dx;
  if (!cf.whole_domain) {
    const auto dens = boundary_density_J(d, cf, prm, ydot);
    double b = 0.0;
    for (double v : dens) b += v;
    r.boundary = b * d.dx;
  }
  r.momentum = 0.0;
  r.total = r.bulk + r.boundary;
  return r;
}

std::vector<double> boundary_density_I2(const StateDerivs& d, const CutoffFields& cf,
                                        const Params& prm, std::span<const double> ydot,
                                        int axis2) {
  check_pair(d, 0, axis2);
  const std::size_t q = static_cast<std::size_t>(axis2);
  const auto& z2 = cf.z[q];
  const auto& da2 = cf.grad_a[q];
  const auto& du2 = d.du[q];
  const auto& d22 = d.hess(axis2, axis2);
  std::vector<double> out(d.u.size());
  for (std::size_t i = 0; i < d.u.size(); ++i) {
    const double up1 = std::pow(std::abs(d.u[i]), prm.p + 1.0);
    const double etil = -d.v[i] * d.v[i] + d.lap[i] * d.lap[i] +
                        prm.m * d.u[i] * d.u[i] +
                        2.0 * prm.lambda / (prm.p + 1.0) * up1;
    double grad_hess = 0.0;  // grad a . grad(d_2 u)
    double ydot_grad = 0.0;
    for (int a = 0; a < d.dim; ++a) {
      grad_hess += cf.grad_a[static_cast<std::size_t>(a)][i] * d.hess(a, axis2)[i];
      ydot_grad += ydot[static_cast<std::size_t>(a)] *
                   cf.grad_a[static_cast<std::size_t>(a)][i];
    }
    out[i] = 0.5 * (cf.a[i] - 1.0 + z2[i] * da2[i]) * etil -
             2.0 * (cf.a[i] - 1.0) * d22[i] * d.lap[i] -
             (z2[i] * cf.lap_a[i] + 2.0 * da2[i]) * du2[i] * d.lap[i] -
             2.0 * z2[i] * grad_hess * d.lap[i] -
             (ydot[q] * (cf.a[i] - 1.0) + z2[i] * ydot_grad) * du2[i] * d.v[i];
  }
  return out;
}

RhsParts rhs_dI2(const StateDerivs& d, const CutoffFields& cf, const Params& prm,
                 std::span<const double> ydot, int axis2) {
  check_pair(d, 0, axis2);
  RhsParts r;
  double etil_sum = 0.0, grad2_sum = 0.0, mom2 = 0.0;
  const auto& du2 = d.du[static_cast<std::size_t>(axis2)];
  for (std::size_t i = 0; i < d.u.size(); ++i) {
    const double up1 = std::pow(std::abs(d.u[i]), prm.p + 1.0);
    etil_sum += -d.v[i] * d.v[i] + d.lap[i] * d.lap[i] + prm.m * d.u[i] * d.u[i] +
                2.0 * prm.lambda / (prm.p + 1.0) * up1;
    double g2 = 0.0;
    for (int a = 0; a < d.dim; ++a) {
      const double h = d.hess(a, axis2)[i];
      g2 += h * h;
    }
    grad2_sum += g2;
    mom2 += d.v[i] * du2[i];
  }
  r.bulk = (0.5 * etil_sum - 2.0 * grad2_sum) * d.dx;
  r.momentum = -ydot[static_cast<std::size_t>(axis2)] * mom2 * d.dx;
  if (!cf.whole_domain) {
    const auto dens = boundary_density_I2(d, cf, prm, ydot, axis2);
    double b = 0.0;
    for (double v : dens) b += v;
    r.boundary = b * d.dx;
  }
  r.total = r.bulk + r.boundary + r.momentum;
  return r;
}

RhsParts rhs_dA2(const StateDerivs& d, const CutoffFields& cf, const Params& prm,
                 std::span<const double> ydot, int axis2) {
  const RhsParts i2 = rhs_dI2(d, cf, prm, ydot, axis2);
  const RhsParts j = rhs_dJ(d, cf, prm, ydot);
  RhsParts r;
  // Bulk in the sign-definite display form; equal to i2.bulk + j.bulk/2.
  double acc = 0.0;
  for (std::size_t i = 0; i < d.u.size(); ++i) {
    double g2 = 0.0;
    for (int a = 0; a < d.dim; ++a) {
      const double h = d.hess(a, axis2)[i];
      g2 += h * h;
    }
    const double up1 = std::pow(std::abs(d.u[i]), prm.p + 1.0);
    acc += g2 + prm.lambda * (prm.p - 1.0) / (4.0 * (prm.p + 1.0)) * up1;
  }
  r.bulk = -2.0 * acc * d.dx;
  r.boundary = i2.boundary + 0.5 * j.boundary;
  r.momentum = i2.momentum;
  r.total = r.bulk + r.boundary + r.momentum;
  return r;
}

std::vector<double> boundary_density_Ia(const StateDerivs& d, const CutoffFields& cf,
                                        const Params& prm, std::span<const double> ydot) {
  std::vector<double> out(d.u.size());
  for (std::size_t i = 0; i < d.u.size(); ++i) {
    const double up1 = std::pow(std::abs(d.u[i]), prm.p + 1.0);
    const double eprime = prm.m * d.u[i] * d.u[i] + d.lap[i] * d.lap[i] +
                          2.0 * prm.lambda / (prm.p + 1.0) * up1 -
                          d.v[i] * d.v[i];
    double zgrad_u = 0.0, zgrad_a = 0.0, grad_au = 0.0, ydot_grada = 0.0,
           ydot_gradu = 0.0, hess_mix = 0.0;
    for (int a = 0; a < d.dim; ++a) {
      const double za = cf.z[static_cast<std::size_t>(a)][i];
      const double ga = cf.grad_a[static_cast<std::size_t>(a)][i];
      const double dua = d.du[static_cast<std::size_t>(a)][i];
      zgrad_u += za * dua;
      zgrad_a += za * ga;
      grad_au += ga * dua;
      ydot_grada += ydot[static_cast<std::size_t>(a)] * ga;
      ydot_gradu += ydot[static_cast<std::size_t>(a)] * dua;
      for (int b = 0; b < d.dim; ++b)
        hess_mix += ga * cf.z[static_cast<std::size_t>(b)][i] * d.hess(a, b)[i];
    }
    out[i] = (cf.a[i] - 1.0) * (0.5 * d.dim * eprime - 2.0 * d.lap[i] * d.lap[i]) +
             0.5 * zgrad_a * eprime - cf.lap_a[i] * zgrad_u * d.lap[i] -
             2.0 * grad_au * d.lap[i] - 2.0 * hess_mix * d.lap[i] -
             ydot_grada * zgrad_u * d.v[i] - (cf.a[i] - 1.0) * ydot_gradu * d.v[i];
  }
  return out;
}

RhsParts rhs_dIa(const StateDerivs& d, const CutoffFields& cf, const Params& prm,
                 std::span<const double> ydot) {
  RhsParts r;
  double eprime_sum = 0.0, lap2_sum = 0.0, mom_dot = 0.0;
  for (std::size_t i = 0; i < d.u.size(); ++i) {
    const double up1 = std::pow(std::abs(d.u[i]), prm.p + 1.0);
    eprime_sum += prm.m * d.u[i] * d.u[i] + d.lap[i] * d.lap[i] +
                  2.0 * prm.lambda / (prm.p + 1.0) * up1 - d.v[i] * d.v[i];
    lap2_sum += d.lap[i] * d.lap[i];
    double yg = 0.0;
    for (int a = 0; a < d.dim; ++a)
      yg += ydot[static_cast<std::size_t>(a)] * d.du[static_cast<std::size_t>(a)][i];
    mom_dot += yg * d.v[i];
  }
  r.bulk = (0.5 * d.dim * eprime_sum - 2.0 * lap2_sum) * d.dx;
  r.momentum = -mom_dot * d.dx;
  if (!cf.whole_domain) {
    const auto dens = boundary_density_Ia(d, cf, prm, ydot);
    double b = 0.0;
    for (double v : dens) b += v;
    r.boundary = b * d.dx;
  }
  r.total = r.bulk + r.boundary + r.momentum;
  return r;
}

RhsParts rhs_dA(const StateDerivs& d, const CutoffFields& cf, const Params& prm,
                std::span<const double> ydot) {
  const RhsParts ia = rhs_dIa(d, cf, prm, ydot);
  const RhsParts j = rhs_dJ(d, cf, prm, ydot);
  RhsParts r;
  double acc = 0.0;
  for (std::size_t i = 0; i < d.u.size(); ++i) {
    const double up1 = std::pow(std::abs(d.u[i]), prm.p + 1.0);
    acc += d.lap[i] * d.lap[i] +
           prm.lambda * d.dim * (prm.p - 1.0) / (4.0 * (prm.p + 1.0)) * up1;
  }
  r.bulk = -2.0 * acc * d.dx;
  r.boundary = ia.boundary + 0.5 * d.dim * j.boundary;
  r.momentum = ia.momentum;
  r.total = r.bulk + r.boundary + r.momentum;
  return r;
}

std::vector<double> boundary_density_Rij(const StateDerivs& d, const CutoffFields& cf,
                                         const Params& prm, std::span<const double> ydot,
                                         int i, int j) {
  check_pair(d, i, j);
  const auto& zi = cf.z[static_cast<std::size_t>(i)];
  const auto& zj = cf.z[static_cast<std::size_t>(j)];
  const auto& dai = cf.grad_a[static_cast<std::size_t>(i)];
  const auto& daj = cf.grad_a[static_cast<std::size_t>(j)];
  const auto& dui = d.du[static_cast<std::size_t>(i)];
  const auto& duj = d.du[static_cast<std::size_t>(j)];
  std::vector<double> out(d.u.size());
  for (std::size_t k = 0; k < d.u.size(); ++k) {
    const double up1 = std::pow(std::abs(d.u[k]), prm.p + 1.0);
    const double quad = d.v[k] * d.v[k] - prm.m * d.u[k] * d.u[k] -
                        d.lap[k] * d.lap[k] -
                        2.0 * prm.lambda / (prm.p + 1.0) * up1;
    const double rot_u = zj[k] * dui[k] - zi[k] * duj[k];
    double ydot_grada = 0.0, grad_hess_i = 0.0, grad_hess_j = 0.0;
    for (int a = 0; a < d.dim; ++a) {
      const double ga = cf.grad_a[static_cast<std::size_t>(a)][k];
      ydot_grada += ydot[static_cast<std::size_t>(a)] * ga;
      grad_hess_i += ga * d.hess(a, i)[k];
      grad_hess_j += ga * d.hess(a, j)[k];
    }
    out[k] = -ydot_grada * rot_u * d.v[k] -
             0.5 * (zj[k] * dai[k] - zi[k] * daj[k]) * quad -
             cf.lap_a[k] * rot_u * d.lap[k] -
             2.0 * (daj[k] * dui[k] - dai[k] * duj[k]) * d.lap[k] -
             2.0 * (zj[k] * grad_hess_i - zi[k] * grad_hess_j) * d.lap[k];
  }
  return out;
}

RhsParts rhs_dRij(const StateDerivs& d, const CutoffFields& cf, const Params& prm,
                  std::span<const double> ydot, int i, int j) {
  check_pair(d, i, j);
  RhsParts r;
  const auto& dui = d.du[static_cast<std::size_t>(i)];
  const auto& duj = d.du[static_cast<std::size_t>(j)];
  double mom = 0.0;
  for (std::size_t k = 0; k < d.u.size(); ++k)
    mom += cf.a[k] *
           (ydot[static_cast<std::size_t>(j)] * dui[k] -
            ydot[static_cast<std::size_t>(i)] * duj[k]) *
           d.v[k];
  r.bulk = 0.0;
  r.momentum = -mom * d.dx;  // the a-weighted -ydot . Omega_ij contribution
  if (!cf.whole_domain) {
    const auto dens = boundary_density_Rij(d, cf, prm, ydot, i, j);
    double b = 0.0;
    for (double v : dens) b += v;
    r.boundary = b * d.dx;
  }
  r.total = r.bulk + r.boundary + r.momentum;
  return r;
}

std::vector<double> identity_residual(std::span<const double> action,
                                      std::span<const double> rhs,
                                      std::span<const double> energy, double h) {
  if (action.size() < 3)
    throw std::invalid_argument("identity residual needs at least three samples");
  if (action.size() != rhs.size() || action.size() != energy.size())
    throw std::invalid_argument("series length mismatch");
  if (!(h > 0.0)) throw std::invalid_argument("cadence must be positive");
  std::vector<double> out(action.size(), kNaN);
  for (std::size_t k = 1; k + 1 < action.size(); ++k) {
    const double fd = (action[k + 1] - action[k - 1]) / (2.0 * h);
    const double scale = std::max(std::abs(rhs[k]), std::abs(energy[k]));
    out[k] = scale > 0.0 ? std::abs(fd - rhs[k]) / scale : std::abs(fd - rhs[k]);
  }
  return out;
}

void virial_pass(Trajectory& traj, const VirialOptions& opt) {
  auto& recs = traj.records;
  if (recs.size() != traj.states.size())
    throw std::invalid_argument(
        "virial pass needs the full state at every record (state_stride = 1)");
  if (recs.size() < 3)
    throw std::invalid_argument("virial pass needs at least three records");
  const Grid& g = traj.states.front().grid();
  const int dim = g.dim();
  if (dim < 2)
    throw std::invalid_argument("directional actions need dimension >= 2");
  const bool fixed_center = !opt.center.empty();
  if (fixed_center && static_cast<int>(opt.center.size()) != dim)
    throw std::invalid_argument("virial center dimension mismatch");

  const std::size_t n = recs.size();
  auto center_at = [&](std::size_t k) -> std::vector<double> {
    if (fixed_center) return opt.center;
    if (recs[k].y_tilde.empty())
      throw std::invalid_argument("virial pass needs smoothed centers or a fixed center");
    return recs[k].y_tilde;
  };
  auto ydot_at = [&](std::size_t k) -> std::vector<double> {
    if (!opt.ydot_from_centers || fixed_center) return zero_vec(dim);
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = k + 1 < n ? k + 1 : k;
    const double dt = recs[hi].t - recs[lo].t;
    std::vector<double> yd(static_cast<std::size_t>(dim), 0.0);
    const auto& a = recs[lo].y_tilde;
    const auto& b = recs[hi].y_tilde;
    for (int q = 0; q < dim; ++q)
      yd[static_cast<std::size_t>(q)] =
          (b[static_cast<std::size_t>(q)] - a[static_cast<std::size_t>(q)]) / dt;
    return yd;
  };

  const std::size_t npairs = static_cast<std::size_t>(dim * (dim - 1) / 2);
  std::vector<double> rhsA2(n), rhsA(n);
  std::vector<std::vector<double>> rhsR(npairs, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const StateDerivs d = compute_derivs(traj.states[k]);
    const auto c = center_at(k);
    const auto yd = ydot_at(k);
    const CutoffFields cf = opt.R > 0.0 ? make_cutoff(g, c, opt.R)
                                        : make_cutoff_whole_domain(g, c);
    auto& r = recs[k];
    r.I2 = action_I2(d, cf, opt.axis2);
    r.J = action_J(d, cf);
    r.A2 = r.I2 + 0.5 * r.J;
    r.Ia = action_Ia(d, cf);
    r.A = r.Ia + 0.5 * dim * r.J;
    const RhsParts a2 = rhs_dA2(d, cf, traj.params, yd, opt.axis2);
    r.dA2_rhs_bulk = a2.bulk;
    r.dA2_rhs_bnd = a2.boundary;
    rhsA2[k] = a2.total;
    const RhsParts at = rhs_dA(d, cf, traj.params, yd);
    r.dA_rhs = at.total;
    rhsA[k] = at.total;
    r.Rij.resize(npairs);
    std::size_t q = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j, ++q) {
        r.Rij[q] = action_Rij(d, cf, i, j);
        rhsR[q][k] = rhs_dRij(d, cf, traj.params, yd, i, j).total;
      }
  }

  const double h = traj.record_dt;
  std::vector<double> A2s(n), As(n), Es(n);
  for (std::size_t k = 0; k < n; ++k) {
    A2s[k] = recs[k].A2;
    As[k] = recs[k].A;
    Es[k] = recs[k].E;
  }
  const auto resA2 = identity_residual(A2s, rhsA2, Es, h);
  const auto resA = identity_residual(As, rhsA, Es, h);
  for (std::size_t k = 0; k < n; ++k) {
    recs[k].res_A2 = resA2[k];
    recs[k].res_A = resA[k];
    recs[k].dA2_fd = (k > 0 && k + 1 < n) ? (A2s[k + 1] - A2s[k - 1]) / (2.0 * h) : kNaN;
    recs[k].dA_fd = (k > 0 && k + 1 < n) ? (As[k + 1] - As[k - 1]) / (2.0 * h) : kNaN;
    recs[k].res_Rij.assign(npairs, kNaN);
  }
  for (std::size_t q = 0; q < npairs; ++q) {
    std::vector<double> Rs(n);
    for (std::size_t k = 0; k < n; ++k) Rs[k] = recs[k].Rij[q];
    const auto res = identity_residual(Rs, rhsR[q], Es, h);
    for (std::size_t k = 0; k < n; ++k) recs[k].res_Rij[q] = res[k];
  }
}

namespace {

// Least-squares slope of y against t.
double ls_slope(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = t.size();
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (t[i] - mt) * (y[i] - my);
    den += (t[i] - mt) * (t[i] - mt);
  }
  return den > 0.0 ? num / den : 0.0;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  const double den = std::sqrt(da * db);
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace

GrowthReport momentum_growth_check(const Trajectory& traj) {
  GrowthReport rep;
  const auto& recs = traj.records;
  if (recs.size() != traj.states.size())
    throw std::invalid_argument("growth check needs the full state at every record");
  if (recs.empty() || recs.front().y.empty())
    throw std::invalid_argument("growth check needs tracked centers");
  const auto& mom = recs.front().mom;
  double mom_norm = 0.0;
  for (double v : mom) mom_norm += v * v;
  mom_norm = std::sqrt(mom_norm);
  const double escale = std::max(recs.front().E, 1e-300);
  if (mom_norm / escale < 1e-10) {
    rep.applicable = false;
    return rep;
  }
  rep.applicable = true;
  const Params& prm = traj.params;
  const double cp = prm.lambda * traj.states.front().grid().dim() * (prm.p - 1.0) /
                    (4.0 * (prm.p + 1.0));
  const std::size_t n = recs.size();
  rep.t.resize(n);
  rep.y_dot_mom.resize(n);
  rep.bulk_cum.resize(n);
  std::vector<double> binst(n);
  for (std::size_t k = 0; k < n; ++k) {
    rep.t[k] = recs[k].t;
    rep.y_dot_mom[k] = dot(recs[k].y, mom);
    const double lap2 = std::pow(lp_norm(laplacian(traj.states[k].u), 2.0), 2.0);
    binst[k] = 2.0 * (lap2 + cp * recs[k].s_inst);
  }
  rep.bulk_cum[0] = 0.0;
  for (std::size_t k = 1; k < n; ++k)
    rep.bulk_cum[k] = rep.bulk_cum[k - 1] +
                      0.5 * (rep.t[k] - rep.t[k - 1]) * (binst[k - 1] + binst[k]);
  std::vector<double> D(n);
  for (std::size_t k = 0; k < n; ++k) D[k] = rep.y_dot_mom[k] + rep.bulk_cum[k];
  rep.slope = ls_slope(rep.t, D);
  rep.eps = std::abs(rep.slope);
  double c = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    c = std::max(c, std::abs(D[k] - rep.slope * rep.t[k]));
  rep.C = c;
  std::vector<double> neg_ym(n);
  for (std::size_t k = 0; k < n; ++k) neg_ym[k] = -rep.y_dot_mom[k];
  rep.corr = pearson(neg_ym, rep.bulk_cum);
  return rep;
}

DriftReport transverse_drift_check(const Trajectory& traj, std::span<const double> Z) {
  DriftReport rep;
  const auto& recs = traj.records;
  if (recs.empty() || recs.front().y.empty())
    throw std::invalid_argument("drift check needs tracked centers");
  const auto& mom = recs.front().mom;
  if (Z.size() != mom.size())
    throw std::invalid_argument("transverse vector dimension mismatch");
  double mom_norm = 0.0, z_norm = 0.0, zm = 0.0;
  for (std::size_t a = 0; a < mom.size(); ++a) {
    mom_norm += mom[a] * mom[a];
    z_norm += Z[a] * Z[a];
    zm += Z[a] * mom[a];
  }
  mom_norm = std::sqrt(mom_norm);
  z_norm = std::sqrt(z_norm);
  const double escale = std::max(recs.front().E, 1e-300);
  if (mom_norm / escale < 1e-10) {
    rep.applicable = false;
    return rep;
  }
  if (std::abs(zm) > 1e-8 * z_norm * mom_norm)
    throw std::invalid_argument("Z must be orthogonal to the momentum");
  rep.applicable = true;
  const std::size_t n = recs.size();
  rep.t.resize(n);
  rep.z_dot_y.resize(n);
  std::vector<double> absz(n);
  for (std::size_t k = 0; k < n; ++k) {
    rep.t[k] = recs[k].t;
    rep.z_dot_y[k] = dot(Z, recs[k].y);
    absz[k] = std::abs(rep.z_dot_y[k]);
  }
  rep.slope = std::max(0.0, ls_slope(rep.t, absz));
  rep.eps = rep.slope;
  double c = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    c = std::max(c, absz[k] - rep.slope * rep.t[k]);
  rep.C = c;
  return rep;
}

}  // namespace beam
