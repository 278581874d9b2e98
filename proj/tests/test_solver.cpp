//==============================================================================
// test_solver.cpp — splitting integrator, conservation, functionals.
//==============================================================================
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "beam/rng.hpp"
#include "beam/solver.hpp"
#include "beam/spectral.hpp"

using namespace beam;

namespace {
constexpr double pi = std::numbers::pi;

Grid box(double L = 24.0, int n = 48) { return Grid({n, n}, {L, L}); }

Field centered_gaussian(const Grid& g, double amp, double width) {
  return Field::from_function(g, [&](std::span<const double> x) {
    double q = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const double d = g.min_image(a, x[a] - 0.5 * g.length(a));
      q += d * d;
    }
    return amp * std::exp(-q / (2.0 * width * width));
  });
}

double state_gap(const EnergyState& a, const EnergyState& b, double m) {
  return std::sqrt(free_energy(sub(a, b), m));
}

}  // namespace

TEST_CASE("nonlinear substep: fixed u, exact pointwise kick") {
  Grid g = box();
  Params prm{1.0, 1.0, 3.0};

  EnergyState zero = zero_state(g);
  EnergyState kicked = nonlinear_substep(zero, 0.1, prm);
  CHECK(lp_norm(kicked.u, kInfExponent) == 0.0);
  CHECK(lp_norm(kicked.v, kInfExponent) == 0.0);

  // u == 2, p = 3, lambda = 1, tau = 0.1: v decreases by 0.8 everywhere
  Field two = Field::from_function(g, [](std::span<const double>) { return 2.0; });
  EnergyState s(two, Field::zeros(g));
  EnergyState out = nonlinear_substep(s, 0.1, prm);
  for (double v : out.v.samples()) CHECK(v == doctest::Approx(-0.8).epsilon(1e-13));
  for (std::size_t i = 0; i < out.u.samples().size(); ++i)
    CHECK(out.u.samples()[i] == s.u.samples()[i]);  // u untouched

  // overflow guard reports the offending amplitude
  Field huge = Field::from_function(g, [](std::span<const double>) { return 1e200; });
  CHECK_THROWS_WITH_AS(nonlinear_substep(EnergyState(huge, Field::zeros(g)), 0.1,
                                         Params{1.0, 1.0, 5.0}),
                       doctest::Contains("1e+200"), std::runtime_error);
}

TEST_CASE("substep conserves momentum to quadrature accuracy") {
  Grid g = box();
  Params prm{1.0, 1.0, 3.0};
  Field u = centered_gaussian(g, 0.9, 2.0);
  Field v = random_bandlimited_field(g, 2.0, 0.5, 3, 1);
  EnergyState s(u, v);
  const auto before = momentum(s);
  const auto after = momentum(nonlinear_substep(s, 0.05, prm));
  // int |u|^{p-1} u du/dx_i dx = (1/(p+1)) int d/dx_i |u|^{p+1} dx = 0
  const double scale = std::max(1.0, free_energy(s, prm.m));
  for (std::size_t a = 0; a < before.size(); ++a)
    CHECK(std::abs(after[a] - before[a]) / scale < 1e-12);
}

TEST_CASE("lambda = 0 collapses the strang step to the exact linear flow") {
  Grid g = box();
  Params lin{1.0, 0.0, 3.0};
  EnergyState s(centered_gaussian(g, 1.0, 2.0),
                random_bandlimited_field(g, 2.0, 0.4, 5, 0));
  EnergyState a = strang_step(s, 0.37, lin);
  EnergyState b = evolve_linear(s, 0.37, lin.m);
  for (std::size_t i = 0; i < a.u.samples().size(); ++i) {
    CHECK(a.u.samples()[i] == b.u.samples()[i]);
    CHECK(a.v.samples()[i] == b.v.samples()[i]);
  }
  CHECK_THROWS_AS(strang_step(s, -0.1, lin), std::invalid_argument);
}

TEST_CASE("self-convergence at second order") {
  Grid g = box(20.0, 48);
  Params prm{1.0, 1.0, 3.0};
  EnergyState init(centered_gaussian(g, 0.8, 1.5), Field::zeros(g));
  const double T = 0.4;
  auto final_state = [&](double dt) {
    SimOptions opt;
    opt.dt = dt;
    opt.T = T;
    opt.record_stride = static_cast<int>(std::llround(T / dt));
    opt.state_stride = 1;
    return simulate(init, prm, opt).final_state();
  };
  const EnergyState ref = final_state(T / 3200.0);  // dt/16 of the finest tested
  const double e1 = state_gap(final_state(T / 100.0), ref, prm.m);
  const double e2 = state_gap(final_state(T / 200.0), ref, prm.m);
  const double order = std::log2(e1 / e2);
  CHECK(order > 1.8);
  CHECK(order < 2.2);
}

TEST_CASE("time reversibility to splitting accuracy") {
  Grid g = box();
  Params prm{1.0, 1.0, 3.0};
  EnergyState init(centered_gaussian(g, 0.7, 2.0),
                   random_bandlimited_field(g, 1.5, 0.2, 8, 2));
  const double dt = 1e-3;
  EnergyState fwd = init;
  for (int i = 0; i < 50; ++i) fwd = strang_step(fwd, dt, prm);
  EnergyState flipped(fwd.u, -1.0 * fwd.v);
  for (int i = 0; i < 50; ++i) flipped = strang_step(flipped, dt, prm);
  EnergyState expect(init.u, -1.0 * init.v);
  CHECK(state_gap(flipped, expect, prm.m) / std::sqrt(free_energy(init, prm.m)) <
        1e-12);
}

TEST_CASE("simulate: zero data, cadence validation, linear exactness") {
  Grid g = box();
  Params prm{1.0, 1.0, 3.0};
  SimOptions opt;
  opt.dt = 1e-2;
  opt.T = 0.1;
  opt.record_stride = 5;
  Trajectory z = simulate(zero_state(g), prm, opt);
  for (const auto& r : z.records) {
    CHECK(r.E == 0.0);
    CHECK(r.s_inst == 0.0);
  }

  SimOptions bad = opt;
  bad.T = 0.1234;  // not a multiple of dt
  CHECK_THROWS_AS(simulate(zero_state(g), prm, bad), std::invalid_argument);
  bad = opt;
  bad.record_stride = 3;  // 10 steps not a multiple of 3
  CHECK_THROWS_AS(simulate(zero_state(g), prm, bad), std::invalid_argument);

  // lambda = 0 single mode matches the closed form at every snapshot
  Grid g2({32, 32}, {2.0 * pi, 2.0 * pi});
  Field u0 = Field::from_function(g2, [](std::span<const double> x) {
    return 0.3 * std::cos(x[0] + 2.0 * x[1]);
  });
  Params lin{1.0, 0.0, 3.0};
  SimOptions lopt;
  lopt.dt = 1e-3;
  lopt.T = 1.0;
  lopt.record_stride = 100;
  lopt.state_stride = 1;
  Trajectory tr = simulate(EnergyState(u0, Field::zeros(g2)), lin, lopt);
  const double omega = dispersion_omega(5.0, 1.0);
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    const double t = tr.state_times[k];
    Field eu = u0;
    eu *= std::cos(t * omega);
    Field ev = u0;
    ev *= -omega * std::sin(t * omega);
    CHECK(state_gap(tr.states[k], EnergyState(eu, ev), 1.0) /
              std::sqrt(free_energy(tr.states[0], 1.0)) <
          1e-12);
  }
}

TEST_CASE("energy functional spot values") {
  Grid g({16, 16}, {2.0, 3.0});  // volume 6
  CHECK(total_energy(zero_state(g), Params{1.0, 2.0, 3.0}) == 0.0);

  Field one = Field::from_function(g, [](std::span<const double>) { return 1.0; });
  EnergyState s(one, Field::zeros(g));
  // E = V/2 + (lambda/(p+1)) V = 3 + 3 = 6 for lambda = 2, p = 3, m = 1
  CHECK(total_energy(s, Params{1.0, 2.0, 3.0}) == doctest::Approx(6.0).epsilon(1e-13));
  CHECK(total_energy(s, Params{1.0, 0.0, 3.0}) ==
        doctest::Approx(free_energy(s, 1.0)).epsilon(1e-13));
}

TEST_CASE("momentum spot values and parity") {
  Grid g = box();
  CHECK(momentum(EnergyState(centered_gaussian(g, 1.0, 2.0), Field::zeros(g)))[0] ==
        doctest::Approx(0.0));

  // even u and even v in x1: component 0 vanishes by parity
  Field ue = Field::from_function(g, [&](std::span<const double> x) {
    const double d0 = g.min_image(0, x[0] - 12.0);
    const double d1 = g.min_image(1, x[1] - 12.0);
    return std::exp(-d0 * d0 - 0.5 * d1 * d1) * (1.0 + 0.3 * d1);
  });
  Field ve = Field::from_function(g, [&](std::span<const double> x) {
    const double d0 = g.min_image(0, x[0] - 12.0);
    return std::cos(d0) * 0.4;
  });
  CHECK(std::abs(momentum(EnergyState(ue, ve))[0]) < 1e-12);

  // boosted data: Mom_1 = -c * int (d1 g)^2 dx, by direct quadrature
  Field gbump = centered_gaussian(g, 0.8, 2.0);
  const double c = 0.37;
  Field d1g = to_physical(derivative(to_spectral(gbump), 0));
  Field v = d1g;
  v *= -c;
  const double expected = -c * inner(d1g, d1g);
  CHECK(momentum(EnergyState(gbump, v))[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("antisymmetric pair scalars") {
  Grid g = box();
  EnergyState radial(centered_gaussian(g, 1.0, 2.0), centered_gaussian(g, 0.3, 1.5));
  CHECK(std::abs(angular_momentum(radial, 0, 1)) < 1e-12);
  CHECK(angular_momentum(radial, 0, 1) == -angular_momentum(radial, 1, 0));
  CHECK_THROWS_AS(angular_momentum(radial, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(angular_momentum(radial, 0, 5), std::invalid_argument);
  Grid g1({16}, {5.0});
  CHECK_THROWS_AS(angular_momentum(zero_state(g1), 0, 1), std::invalid_argument);

  EnergyState s(centered_gaussian(g, 1.0, 2.0),
                random_bandlimited_field(g, 2.0, 0.5, 17, 3));
  const auto mom = momentum(s);
  CHECK(angular_momentum(s, 0, 1) == doctest::Approx(mom[0] - mom[1]));
  CHECK(omega_pairs(mom).size() == 1);
}

TEST_CASE("conservation along a nonlinear run") {
  Grid g = box(24.0, 48);
  Params prm{1.0, 1.0, 3.0};
  Field u0 = centered_gaussian(g, 0.6, 2.0);
  Field d1 = to_physical(derivative(to_spectral(u0), 0));
  d1 *= -0.4;  // boost so momentum is nontrivial
  EnergyState init(u0, d1);
  SimOptions opt;
  opt.dt = 2e-3;
  opt.T = 2.0;
  opt.record_stride = 100;
  opt.state_stride = 0;
  Trajectory tr = simulate(init, prm, opt);
  const auto& first = tr.records.front();
  const double escale = first.E;
  for (const auto& r : tr.records) {
    CHECK(std::abs(r.E - first.E) / escale < 1e-6);
    for (std::size_t a = 0; a < r.mom.size(); ++a)
      CHECK(std::abs(r.mom[a] - first.mom[a]) / escale < 1e-8);
    for (std::size_t q = 0; q < r.omega.size(); ++q)
      CHECK(std::abs(r.omega[q] - first.omega[q]) / escale < 1e-8);
  }
}

TEST_CASE("energy drift halves by about four when dt halves") {
  Grid g = box(20.0, 48);
  Params prm{1.0, 1.0, 3.0};
  EnergyState init(centered_gaussian(g, 0.8, 1.5), Field::zeros(g));
  auto drift = [&](double dt) {
    SimOptions opt;
    opt.dt = dt;
    opt.T = 1.0;
    opt.record_stride = static_cast<int>(std::llround(0.1 / dt));
    opt.state_stride = 0;
    Trajectory tr = simulate(init, prm, opt);
    double w = 0.0;
    for (const auto& r : tr.records)
      w = std::max(w, std::abs(r.E - tr.records.front().E) / tr.records.front().E);
    return w;
  };
  const double d1 = drift(2e-3);
  const double d2 = drift(1e-3);
  CHECK(d1 / d2 > 3.5);
  CHECK(d1 / d2 < 4.5);
}

TEST_CASE("wrap-around budget arithmetic") {
  Grid g({48, 48}, {20.0, 20.0});
  const BudgetCheck b = check_wraparound(g, 1.0, 1.0);
  CHECK(b.vmax == doctest::Approx(group_velocity_max(g, 1.0)));
  CHECK(b.spread == doctest::Approx(2.0 * b.vmax));
  CHECK(b.limit == 20.0);
  CHECK(b.ok == (b.spread <= 20.0));
  CHECK(check_wraparound(g, 1.0, 1e9).ok == false);
}
