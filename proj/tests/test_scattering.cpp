//==============================================================================
// test_scattering.cpp — pullbacks, defects, Cauchy gaps, experiments.
//==============================================================================
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "beam/config.hpp"
#include "beam/rng.hpp"
#include "beam/scattering.hpp"
#include "beam/spectral.hpp"

using namespace beam;

namespace {

RunConfig small_config() {
  RunConfig cfg;
  cfg.points = {48, 48};
  cfg.lengths = {24.0, 24.0};
  cfg.m = 1.0;
  cfg.lambda = 1.0;
  cfg.p = 3.0;
  cfg.dt = 5e-3;
  cfg.T = 2.0;
  cfg.snapshot_stride = 10;
  cfg.state_stride = 1;
  cfg.kind = "gaussian";
  cfg.amplitude = 0.05;
  cfg.width = 1.5;
  cfg.allow_wraparound = true;  // unit-scale box, horizons beyond the budget
  validate_config(cfg);
  return cfg;
}

}  // namespace

TEST_CASE("pullback inverts the linear flow") {
  Grid g({48, 48}, {24.0, 24.0});
  EnergyState s(random_bandlimited_field(g, 2.0, 1.0, 5, 0),
                random_bandlimited_field(g, 2.0, 0.5, 5, 1));
  const double m = 1.0;
  const double e0 = free_energy(s, m);

  EnergyState same = pullback(s, 0.0, m);
  CHECK(free_energy(sub(same, s), m) / e0 < 1e-28);

  EnergyState fwd = evolve_linear(s, 1.7, m);
  EnergyState back = pullback(fwd, 1.7, m);
  CHECK(std::sqrt(free_energy(sub(back, s), m) / e0) < 1e-12);
}

TEST_CASE("linear runs have zero defect and zero gaps") {
  RunConfig cfg = small_config();
  cfg.lambda = 0.0;
  const Params prm{cfg.m, cfg.lambda, cfg.p};
  const EnergyState init = initial_state(cfg);
  SimOptions opt;
  opt.dt = cfg.dt;
  opt.T = cfg.T;
  opt.record_stride = cfg.snapshot_stride;
  opt.state_stride = 1;
  Trajectory tr = simulate(init, prm, opt);

  const double e0 = std::sqrt(free_energy(init, prm.m));
  // pullback of a linear run is the initial data
  for (double t : {0.5, 1.0, 2.0}) {
    EnergyState pb = pullback(tr.state_at(t), t, prm.m);
    CHECK(std::sqrt(free_energy(sub(pb, init), prm.m)) / e0 < 1e-11);
    CHECK(defect(tr, init, t, prm.m) / e0 < 1e-11);
  }
  const CauchyGaps gaps = cauchy_test(tr, std::vector<double>{0.5, 1.0, 2.0}, prm.m);
  for (double gp : gaps.consecutive) CHECK(gp / e0 < 1e-11);
  CHECK(gaps.gap[1][1] == 0.0);  // identical horizons
  CHECK_THROWS_AS(cauchy_test(tr, std::vector<double>{7.0, 1.0}, prm.m),
                  std::invalid_argument);
  CHECK_THROWS_AS(cauchy_test(tr, std::vector<double>{1.0}, prm.m),
                  std::invalid_argument);
}

TEST_CASE("defect against the pullback at the same time vanishes by construction") {
  RunConfig cfg = small_config();
  const Params prm{cfg.m, cfg.lambda, cfg.p};
  const EnergyState init = initial_state(cfg);
  SimOptions opt;
  opt.dt = cfg.dt;
  opt.T = cfg.T;
  opt.record_stride = cfg.snapshot_stride;
  opt.state_stride = 1;
  Trajectory tr = simulate(init, prm, opt);
  const double scale = std::sqrt(free_energy(init, prm.m));
  for (double t : {0.5, 1.5}) {
    const EnergyState data = pullback(tr.state_at(t), t, prm.m);
    CHECK(defect(tr, data, t, prm.m) / scale < 1e-12);
  }
  CHECK_THROWS_AS(defect(tr, init, 17.0, prm.m), std::invalid_argument);
}

TEST_CASE("small-data experiment: convention at zero, bounded ratio, report") {
  RunConfig cfg = small_config();
  const std::vector<double> ladder = {0.0, 1e-3, 1e-2};
  const SmallDataReport rep = small_data_experiment(cfg, ladder);
  REQUIRE(rep.amplitudes.size() == 3);
  CHECK(rep.ratio[0] == 1.0);  // amplitude 0 by convention
  CHECK(rep.ratio[1] <= 2.0);
  CHECK(rep.pass);
  // the nonlinear norm tracks the linear one closely at tiny amplitude
  CHECK(rep.ratio[1] == doctest::Approx(1.0).epsilon(1e-3));

  RunConfig linear_cfg = cfg;
  linear_cfg.lambda = 0.0;
  CHECK_THROWS_AS(small_data_experiment(linear_cfg, ladder), std::invalid_argument);
}

TEST_CASE("perturbation experiment: zero forcing is exact, response scales") {
  RunConfig cfg = small_config();
  cfg.T = 1.0;
  cfg.amplitude = 0.3;

  // e == 0: u == v exactly (same march, no forcing branch)
  {
    const Params prm{cfg.m, cfg.lambda, cfg.p};
    const EnergyState init = initial_state(cfg);
    SimOptions opt;
    opt.dt = cfg.dt;
    opt.T = cfg.T;
    opt.record_stride = cfg.snapshot_stride;
    opt.state_stride = 1;
    Trajectory a = simulate(init, prm, opt);
    SimOptions opt2 = opt;
    opt2.forcing = [&](double) { return Field::zeros(initial_state(cfg).grid()); };
    Trajectory b = simulate(init, prm, opt2);
    CHECK(free_energy(sub(a.final_state(), b.final_state()), prm.m) < 1e-24);
  }

  const PerturbationReport rep =
      perturbation_experiment(cfg, std::vector<double>{1e-4, 1e-3});
  REQUIRE(rep.response.size() == 2);
  CHECK(rep.response[0] > 0.0);
  const double ratio = rep.response[1] / rep.response[0];
  CHECK(ratio > 3.0);   // within [0.3, 3] x delta ratio 10
  CHECK(ratio < 30.0);
  CHECK(rep.pass);
  CHECK(rep.fitted_C > 0.0);
  CHECK(rep.sign_conventions.size() == 2);
}

TEST_CASE("scatter experiment produces consistent signatures on a linear-like run") {
  RunConfig cfg = small_config();
  cfg.amplitude = 1e-3;  // effectively linear: gaps at roundoff
  cfg.T = 2.0;
  const ScatterReport rep = scatter_experiment(cfg);
  CHECK(rep.pass_gap);
  CHECK(rep.gap_half_full <= rep.gap_tol);
  CHECK(rep.E0_init > 0.0);
  CHECK(rep.cumulative > 0.0);
  CHECK(rep.gaps.T.size() == 3);
}

TEST_CASE("defect against the final pullback decreases toward the horizon") {
  RunConfig cfg = small_config();
  cfg.amplitude = 0.2;  // visible nonlinear defect
  const Params prm{cfg.m, cfg.lambda, cfg.p};
  const EnergyState init = initial_state(cfg);
  SimOptions opt;
  opt.dt = cfg.dt;
  opt.T = cfg.T;
  opt.record_stride = cfg.snapshot_stride;
  opt.state_stride = 1;
  Trajectory tr = simulate(init, prm, opt);
  const EnergyState data = pullback(tr.state_at(cfg.T), cfg.T, prm.m);
  const double d1 = defect(tr, data, 0.5, prm.m);
  const double d2 = defect(tr, data, 1.5, prm.m);
  const double d3 = defect(tr, data, 2.0, prm.m);
  CHECK(d2 < d1);
  CHECK(d3 < 1e-12 * std::sqrt(free_energy(init, prm.m)));
}
