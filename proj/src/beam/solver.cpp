//==============================================================================
// solver.cpp — split-step march and conserved functionals.
//==============================================================================
#include "beam/solver.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "beam/spectral.hpp"

namespace beam {

namespace {

// sign(u)|u|^p with an overflow guard.
void pointwise_nonlinearity(const std::vector<double>& u, double lambda, double p,
                            std::vector<double>& out) {
  out.assign(u.size(), 0.0);
  if (lambda == 0.0) return;
  double amax = 0.0;
  for (double x : u) amax = std::max(amax, std::abs(x));
  if (amax > 0.0 && p * std::log(amax) > 690.0) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", amax);
    throw std::runtime_error(std::string("nonlinearity overflow: max |u| = ") + buf);
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = u[i];
    out[i] = lambda * std::copysign(std::pow(std::abs(x), p), x);
  }
}

}  // namespace

EnergyState nonlinear_substep(const EnergyState& s, double tau, const Params& prm) {
  prm.validate();
  if (!s.u.is_physical() || !s.v.is_physical())
    throw std::logic_error("nonlinear substep expects physical representation");
  if (prm.lambda == 0.0) return s;
  // Truncate u before the pointwise evaluation, and the product afterwards.
  Field ut = dealias(s.u);
  std::vector<double> g;
  pointwise_nonlinearity(ut.samples(), prm.lambda, prm.p, g);
  Field gf = dealias(Field::from_samples(s.u.grid(), std::move(g)));
  Field v = s.v;
  auto& vs = v.samples();
  const auto& gs = gf.samples();
  for (std::size_t i = 0; i < vs.size(); ++i) vs[i] -= tau * gs[i];
  return EnergyState(s.u, std::move(v));
}

EnergyState strang_step(const EnergyState& s, double dt, const Params& prm) {
  prm.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (prm.lambda == 0.0) return evolve_linear(s, dt, prm.m);
  EnergyState half = evolve_linear(s, 0.5 * dt, prm.m);
  EnergyState kicked = nonlinear_substep(half, dt, prm);
  return evolve_linear(kicked, 0.5 * dt, prm.m);
}

double total_energy(const EnergyState& s, const Params& prm) {
  prm.validate();
  const double e0 = free_energy(s, prm.m);
  if (prm.lambda == 0.0) return e0;
  const double snorm = std::pow(lp_norm(s.u, prm.p + 1.0), prm.p + 1.0);
  return e0 + prm.lambda / (prm.p + 1.0) * snorm;
}

std::vector<double> momentum(const EnergyState& s) {
  const int n = s.grid().dim();
  const Field vu = ensure_physical(s.v);
  std::vector<double> mom(static_cast<std::size_t>(n), 0.0);
  const Field uspec = ensure_spectral(s.u);
  for (int a = 0; a < n; ++a)
    mom[static_cast<std::size_t>(a)] = inner(vu, derivative(uspec, a));
  return mom;
}

double angular_momentum(const EnergyState& s, int i, int j) {
  const int n = s.grid().dim();
  if (n < 2) throw std::invalid_argument("antisymmetric pairs need dimension >= 2");
  if (i == j) throw std::invalid_argument("antisymmetric pair indices must differ");
  if (i < 0 || j < 0 || i >= n || j >= n)
    throw std::invalid_argument("axis index out of range");
  const auto mom = momentum(s);
  return mom[static_cast<std::size_t>(i)] - mom[static_cast<std::size_t>(j)];
}

std::vector<double> omega_pairs(const std::vector<double>& mom) {
  std::vector<double> out;
  const int n = static_cast<int>(mom.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      out.push_back(mom[static_cast<std::size_t>(i)] - mom[static_cast<std::size_t>(j)]);
  return out;
}

BudgetCheck check_wraparound(const Grid& g, double m, double T) {
  BudgetCheck b;
  b.vmax = group_velocity_max(g, m);
  b.spread = 2.0 * b.vmax * std::abs(T);
  b.limit = g.length(0);
  for (int a = 1; a < g.dim(); ++a) b.limit = std::min(b.limit, g.length(a));
  b.ok = b.spread <= b.limit;
  return b;
}

DiagnosticsRecord make_record(const EnergyState& s, double t, const Params& prm,
                              bool concentration, double R) {
  DiagnosticsRecord r;
  r.t = t;
  r.E0 = free_energy(s, prm.m);
  r.E = prm.lambda == 0.0
            ? r.E0
            : r.E0 + prm.lambda / (prm.p + 1.0) * std::pow(lp_norm(s.u, prm.p + 1.0), prm.p + 1.0);
  r.mom = momentum(s);
  r.omega = omega_pairs(r.mom);
  r.s_inst = std::pow(lp_norm(s.u, prm.p + 1.0), prm.p + 1.0);
  if (concentration) {
    r.y = concentration_sup(s, R, prm.m).y;
  }
  return r;
}

const EnergyState& Trajectory::state_at(double t) const {
  const double tol = 0.5 * record_dt > 0 ? 0.5 * record_dt : 1e-12;
  for (std::size_t i = 0; i < state_times.size(); ++i)
    if (std::abs(state_times[i] - t) <= tol) return states[i];
  throw std::invalid_argument("no stored state at t = " + std::to_string(t));
}

const EnergyState& Trajectory::final_state() const {
  if (states.empty()) throw std::logic_error("trajectory holds no states");
  return states.back();
}

Trajectory simulate(const EnergyState& init, const Params& prm, const SimOptions& opt) {
  prm.validate();
  if (!(opt.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (opt.record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
  const double steps_real = opt.T / opt.dt;
  const long long n_steps = std::llround(steps_real);
  if (n_steps < 0 || std::abs(steps_real - static_cast<double>(n_steps)) > 1e-9 * std::max(1.0, steps_real))
    throw std::invalid_argument("T must be a nonnegative integer multiple of dt");
  if (n_steps % opt.record_stride != 0)
    throw std::invalid_argument("step count must be a multiple of record_stride");

  const Grid& g = init.grid();
  Trajectory traj;
  traj.params = prm;
  traj.dt = opt.dt;
  traj.record_dt = opt.dt * opt.record_stride;

  // March in spectral variables; the linear half step is a precomputed
  // per-mode 2x2 block, the kick costs one inverse + one forward transform.
  Field uh = ensure_spectral(init.u);
  Field vh = ensure_spectral(init.v);
  const std::size_t nn = g.size();
  std::vector<double> ch(nn), snw(nn), wsn(nn);  // cos, sin/w, -w sin for dt/2
  std::vector<unsigned char> keep(nn);
  {
    const double h = (prm.lambda == 0.0 && !opt.forcing) ? opt.dt : 0.5 * opt.dt;
    g.for_each_mode([&](std::size_t flat, std::span<const double> xi,
                        std::span<const int> k) {
      double q = 0.0;
      for (double w : xi) q += w * w;
      const double omega = dispersion_omega(q, prm.m);
      ch[flat] = std::cos(h * omega);
      const double sn = std::sin(h * omega);
      snw[flat] = sn / omega;
      wsn[flat] = -omega * sn;
      keep[flat] = g.mode_dealiased(k) ? 0 : 1;
    });
  }
  auto half_step = [&](Field& u, Field& v) {
    auto& uc = u.coeffs();
    auto& vc = v.coeffs();
    for (std::size_t i = 0; i < nn; ++i) {
      const auto u0 = uc[i];
      const auto v0 = vc[i];
      uc[i] = ch[i] * u0 + snw[i] * v0;
      vc[i] = wsn[i] * u0 + ch[i] * v0;
    }
  };

  const long long total_records = n_steps / opt.record_stride;
  auto record_state = [&](long long rec_index, double t) {
    EnergyState phys(to_physical(uh), to_physical(vh));
    traj.records.push_back(
        make_record(phys, t, prm, opt.concentration, opt.concentration_R));
    const bool keep_state =
        rec_index == 0 || rec_index == total_records ||
        (opt.state_stride > 0 && rec_index % opt.state_stride == 0);
    if (keep_state) {
      traj.state_times.push_back(t);
      traj.states.push_back(std::move(phys));
    }
  };

  record_state(0, 0.0);
  std::vector<double> gwork;
  for (long long step = 1; step <= n_steps; ++step) {
    if (prm.lambda == 0.0 && !opt.forcing) {
      half_step(uh, vh);  // full dt block; the splitting collapses
    } else {
      half_step(uh, vh);
      // Kick: v <- v - dt * (lambda sign(u)|u|^p - e(t_mid)), truncated.
      Field umask = uh;
      auto& uc = umask.coeffs();
      for (std::size_t i = 0; i < nn; ++i)
        if (!keep[i]) uc[i] = 0.0;
      Field uphys = to_physical(umask);
      pointwise_nonlinearity(uphys.samples(), prm.lambda, prm.p, gwork);
      if (opt.forcing) {
        const double tmid = (static_cast<double>(step) - 0.5) * opt.dt;
        Field e = ensure_physical(opt.forcing(tmid));
        require_same_grid(e, uphys);
        const auto& es = e.samples();
        for (std::size_t i = 0; i < gwork.size(); ++i) gwork[i] -= es[i];
      }
      Field gf = to_spectral(Field::from_samples(g, std::move(gwork)));
      gwork.clear();
      const auto& gc = gf.coeffs();
      auto& vc = vh.coeffs();
      for (std::size_t i = 0; i < nn; ++i)
        if (keep[i]) vc[i] -= opt.dt * gc[i];
      half_step(uh, vh);
    }
    if (step % opt.record_stride == 0)
      record_state(step / opt.record_stride, static_cast<double>(step) * opt.dt);
  }
  return traj;
}

}  // namespace beam
