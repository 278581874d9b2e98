//==============================================================================
// scattering.cpp — pullbacks, defects, gaps, and the two experiments.
//==============================================================================
#include "beam/scattering.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "beam/config.hpp"
#include "beam/spectral.hpp"

namespace beam {

EnergyState pullback(const EnergyState& state_at_T, double T, double m) {
  return evolve_linear(state_at_T, -T, m);
}

double defect(const Trajectory& traj, const EnergyState& linear_data, double t,
              double m) {
  const EnergyState& at_t = traj.state_at(t);
  const EnergyState lin = evolve_linear(linear_data, t, m);
  return std::sqrt(free_energy(sub(at_t, lin), m));
}

CauchyGaps cauchy_test(const Trajectory& traj, std::span<const double> T_list,
                       double m) {
  if (T_list.size() < 2)
    throw std::invalid_argument("cauchy test needs at least two horizons");
  CauchyGaps out;
  std::vector<EnergyState> pb;
  for (double T : T_list) {
    // Snap to the nearest stored snapshot so the pullback time matches the
    // state exactly.
    double best = kNaN, dist = kInfExponent;
    for (double t : traj.state_times)
      if (std::abs(t - T) < dist) {
        dist = std::abs(t - T);
        best = t;
      }
    if (!(dist <= 0.5 * traj.record_dt + 1e-12))
      throw std::invalid_argument("no stored snapshot near requested horizon");
    out.T.push_back(best);
    pb.push_back(pullback(traj.state_at(best), best, m));
  }
  out.gap.assign(pb.size(), std::vector<double>(pb.size(), 0.0));
  for (std::size_t i = 0; i < pb.size(); ++i)
    for (std::size_t j = i + 1; j < pb.size(); ++j) {
      const double gapv = std::sqrt(free_energy(sub(pb[i], pb[j]), m));
      out.gap[i][j] = gapv;
      out.gap[j][i] = gapv;
    }
  for (std::size_t i = 0; i + 1 < pb.size(); ++i)
    out.consecutive.push_back(out.gap[i][i + 1]);
  return out;
}

namespace {

// ||u||_S over [0, T] from the cumulative S-integral of a trajectory.
double s_norm_of_run(const EnergyState& init, const Params& prm, double dt, double T,
                     int record_stride) {
  SimOptions opt;
  opt.dt = dt;
  opt.T = T;
  opt.record_stride = record_stride;
  opt.state_stride = 0;
  Trajectory tr = simulate(init, prm, opt);
  s_accumulate(tr.records);
  return std::pow(tr.records.back().s_cum, 1.0 / (prm.p + 1.0));
}

}  // namespace

SmallDataReport small_data_experiment(const RunConfig& cfg,
                                      std::span<const double> amplitudes) {
  SmallDataReport rep;
  rep.horizon = cfg.T;
  const EnergyState base = initial_state(cfg);
  const double base_amp = cfg.amplitude != 0.0 ? cfg.amplitude : 1.0;
  Params nonlinear{cfg.m, cfg.lambda, cfg.p};
  if (nonlinear.lambda == 0.0)
    throw std::invalid_argument("small-data experiment needs lambda > 0");
  Params linear{cfg.m, 0.0, cfg.p};
  for (double a : amplitudes) {
    rep.amplitudes.push_back(a);
    if (a == 0.0) {
      rep.s_nonlinear.push_back(0.0);
      rep.s_linear.push_back(0.0);
      rep.ratio.push_back(1.0);  // by convention
      continue;
    }
    const EnergyState init = scale(a / base_amp, base);
    const double su = s_norm_of_run(init, nonlinear, cfg.dt, cfg.T, cfg.snapshot_stride);
    const double sw = s_norm_of_run(init, linear, cfg.dt, cfg.T, cfg.snapshot_stride);
    rep.s_nonlinear.push_back(su);
    rep.s_linear.push_back(sw);
    rep.ratio.push_back(sw > 0.0 ? su / sw : 1.0);
  }
  double smallest = kInfExponent;
  double ratio_at_smallest = 1.0;
  for (std::size_t i = 0; i < rep.amplitudes.size(); ++i) {
    if (rep.amplitudes[i] > 0.0 && rep.amplitudes[i] < smallest) {
      smallest = rep.amplitudes[i];
      ratio_at_smallest = rep.ratio[i];
    }
  }
  rep.pass = ratio_at_smallest <= rep.ratio_bound;
  return rep;
}

PerturbationReport perturbation_experiment(const RunConfig& cfg,
                                           std::span<const double> deltas) {
  PerturbationReport rep;
  rep.horizon = cfg.T;
  rep.sign_conventions = {
      "applied: u_tt + Lap^2 u + m u + lambda |u|^(p-1) u = e (defocusing sign)",
      "recorded alternative: u_tt + Lap^2 u + m u - lambda |u|^(p-1) u = e"};
  const Grid g = make_grid(cfg);
  const Params prm{cfg.m, cfg.lambda, cfg.p};
  const EnergyState init = initial_state(cfg);

  // Smooth space-time forcing: a unit Gaussian bump at the box center times
  // cos(t), scaled per ladder rung.
  const double w2 = 2.0 * cfg.width * cfg.width;
  Field bump = Field::from_function(g, [&](std::span<const double> x) {
    double q = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const double d = g.min_image(a, x[a] - cfg.center[static_cast<std::size_t>(a)]);
      q += d * d;
    }
    return std::exp(-q / w2);
  });

  SimOptions base_opt;
  base_opt.dt = cfg.dt;
  base_opt.T = cfg.T;
  base_opt.record_stride = cfg.snapshot_stride;
  base_opt.state_stride = 1;
  const Trajectory ref = simulate(init, prm, base_opt);

  const auto [a1, b1] = dual_norm_exponents_low(g.dim());
  const auto [a2, b2] = dual_norm_exponents_high(g.dim());

  for (double d : deltas) {
    rep.deltas.push_back(d);
    SimOptions opt = base_opt;
    opt.forcing = [&bump, d](double t) {
      Field e = bump;
      e *= d * std::cos(t);
      return e;
    };
    const Trajectory forced = simulate(init, prm, opt);
    // ||u - v||_S: trapezoid of the pointwise-difference L^(p+1) norms.
    double acc = 0.0;
    std::vector<double> sn(ref.states.size());
    for (std::size_t k = 0; k < ref.states.size(); ++k)
      sn[k] = std::pow(
          lp_norm(sub(ref.states[k], forced.states[k]).u, prm.p + 1.0), prm.p + 1.0);
    for (std::size_t k = 1; k < sn.size(); ++k)
      acc += 0.5 * (ref.state_times[k] - ref.state_times[k - 1]) * (sn[k - 1] + sn[k]);
    rep.response.push_back(std::pow(acc, 1.0 / (prm.p + 1.0)));
    // ||e||_N over the horizon (sum of the two dual mixed norms).
    std::vector<EnergyState> e_states;
    std::vector<double> e_times;
    for (std::size_t k = 0; k < ref.state_times.size(); ++k) {
      Field e = bump;
      e *= d * std::cos(ref.state_times[k]);
      e_states.push_back(EnergyState(std::move(e), Field::zeros(g)));
      e_times.push_back(ref.state_times[k]);
    }
    rep.forcing_n.push_back(mixed_norm(e_times, e_states, a1, b1, 0.0, cfg.T) +
                            mixed_norm(e_times, e_states, a2, b2, 0.0, cfg.T));
  }
  double c = 0.0;
  for (std::size_t i = 0; i < rep.deltas.size(); ++i)
    if (rep.forcing_n[i] > 0.0) c = std::max(c, rep.response[i] / rep.forcing_n[i]);
  rep.fitted_C = c;
  rep.pass = true;
  for (std::size_t i = 1; i < rep.deltas.size(); ++i) {
    if (rep.response[i - 1] <= 0.0) continue;
    const double resp_ratio = rep.response[i] / rep.response[i - 1];
    const double delta_ratio = rep.deltas[i] / rep.deltas[i - 1];
    if (resp_ratio < 0.3 * delta_ratio || resp_ratio > 3.0 * delta_ratio)
      rep.pass = false;
  }
  return rep;
}

ScatterReport scatter_experiment(const RunConfig& cfg) {
  ScatterReport rep;
  const Params prm{cfg.m, cfg.lambda, cfg.p};
  const EnergyState init = initial_state(cfg);
  rep.E0_init = free_energy(init, prm.m);
  rep.horizon = cfg.T;

  SimOptions opt;
  opt.dt = cfg.dt;
  opt.T = cfg.T;
  opt.record_stride = cfg.snapshot_stride;
  opt.state_stride = cfg.state_stride > 0 ? cfg.state_stride : 1;
  Trajectory tr = simulate(init, prm, opt);
  s_accumulate(tr.records);

  const std::vector<double> T_list = {0.25 * cfg.T, 0.5 * cfg.T, cfg.T};
  rep.gaps = cauchy_test(tr, T_list, prm.m);
  rep.gap_half_full = rep.gaps.gap[1][2];
  rep.gap_tol = cfg.gap_tol_factor * std::sqrt(std::max(rep.E0_init, 0.0));
  rep.pass_gap = rep.gap_half_full <= rep.gap_tol;

  rep.cumulative = tr.records.back().s_cum;
  const double h = tr.record_dt;
  const double tau =
      std::max(1LL, std::llround(cfg.T * cfg.tail_fraction / h)) * h;
  const auto wins = window_density(tr.records, tau);
  rep.tail_window = wins.empty() ? 0.0 : wins.back();
  rep.tail_fraction = rep.cumulative > 0.0 ? rep.tail_window / rep.cumulative : 0.0;
  rep.tail_bound = cfg.tail_fraction;
  rep.pass_tail = rep.tail_fraction <= rep.tail_bound;
  rep.scattering = rep.pass_gap && rep.pass_tail;
  return rep;
}

}  // namespace beam
