//==============================================================================
// diagnostics.cpp — localized energy, concentration tracking, S-accumulation,
// mixed norms, CSV emission.
//==============================================================================
#include "beam/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "beam/spectral.hpp"

namespace beam {

namespace {

// Half the box diameter: a periodic ball of this radius covers the torus.
double covering_radius(const Grid& g) {
  double s = 0.0;
  for (int a = 0; a < g.dim(); ++a) s += 0.25 * g.length(a) * g.length(a);
  return std::sqrt(s);
}

double periodic_dist_sq(const Grid& g, std::span<const double> x,
                        std::span<const double> y) {
  double s = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    const double d = g.min_image(a, x[a] - y[a]);
    s += d * d;
  }
  return s;
}

std::vector<double> cumulative_s(const std::vector<DiagnosticsRecord>& recs) {
  std::vector<double> cum(recs.size(), 0.0);
  for (std::size_t k = 1; k < recs.size(); ++k) {
    const double h = recs[k].t - recs[k - 1].t;
    cum[k] = cum[k - 1] + 0.5 * h * (recs[k - 1].s_inst + recs[k].s_inst);
  }
  return cum;
}

void append_num(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

Field energy_density(const EnergyState& s, double m) {
  const Field lap = ensure_physical(laplacian(s.u));
  const Field u = ensure_physical(s.u);
  const Field v = ensure_physical(s.v);
  Field out(u.grid(), Rep::physical);
  auto& e = out.samples();
  const auto& us = u.samples();
  const auto& vs = v.samples();
  const auto& ls = lap.samples();
  for (std::size_t i = 0; i < e.size(); ++i)
    e[i] = vs[i] * vs[i] + ls[i] * ls[i] + m * us[i] * us[i];
  return out;
}

double localized_energy(const EnergyState& s, std::span<const double> y, double R,
                        double m, bool* clamped) {
  if (!(R > 0.0)) throw std::invalid_argument("ball radius must be positive");
  const Grid& g = s.grid();
  if (static_cast<int>(y.size()) != g.dim())
    throw std::invalid_argument("center dimension mismatch");
  const double cover = covering_radius(g);
  const bool clip = R >= cover;
  if (clamped) *clamped = clip;
  const Field dens = energy_density(s, m);
  const auto& e = dens.samples();
  if (clip) {
    double acc = 0.0;
    for (double v : e) acc += v;
    return acc * g.cell_volume();
  }
  const double r2 = R * R;
  double acc = 0.0;
  g.for_each_point([&](std::size_t flat, std::span<const double> x) {
    if (periodic_dist_sq(g, x, y) <= r2) acc += e[flat];
  });
  return acc * g.cell_volume();
}

ConcentrationSup concentration_sup(const EnergyState& s, double R, double m) {
  if (!(R > 0.0)) throw std::invalid_argument("ball radius must be positive");
  const Grid& g = s.grid();
  const double cover = covering_radius(g);
  const double reff = std::min(R, cover);

  // The localized energy at every grid center at once: a circular
  // convolution of the density with the ball indicator, done spectrally.
  Field dens = energy_density(s, m);
  Field ball(g, Rep::physical);
  {
    auto& b = ball.samples();
    const double r2 = reff * reff;
    g.for_each_point([&](std::size_t flat, std::span<const double> x) {
      double q = 0.0;
      for (int a = 0; a < g.dim(); ++a) {
        const double d = g.min_image(a, x[a]);
        q += d * d;
      }
      b[flat] = q <= r2 ? 1.0 : 0.0;
    });
  }
  Field dhat = to_spectral(dens);
  const Field bhat = to_spectral(ball);
  {
    auto& dc = dhat.coeffs();
    const auto& bc = bhat.coeffs();
    const double nn = static_cast<double>(g.size());
    for (std::size_t i = 0; i < dc.size(); ++i) dc[i] *= nn * bc[i];
  }
  const Field le = to_physical(dhat);
  const auto& vals = le.samples();
  const double dx = g.cell_volume();

  double vmax = 0.0;
  for (double v : vals) vmax = std::max(vmax, v);
  // Near-ties resolve to the smallest flat index so symmetric data gives a
  // reproducible argmax in the presence of convolution roundoff.
  const double thresh = vmax - 1e-9 * std::max(vmax, 1e-300);
  std::size_t best = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] >= thresh) {
      best = i;
      break;
    }
  }
  ConcentrationSup out;
  out.value = std::max(0.0, vmax) * dx;
  out.y.resize(static_cast<std::size_t>(g.dim()));
  int idx[kMaxDim];
  g.unflatten(best, idx);
  for (int a = 0; a < g.dim(); ++a)
    out.y[static_cast<std::size_t>(a)] = g.coordinate(a, idx[a]);
  return out;
}

double concentration_radius(const EnergyState& s, double delta, double m,
                            std::span<const double> ladder, bool* saturated) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in (0, 1)");
  if (ladder.empty()) throw std::invalid_argument("radius ladder is empty");
  const double target = (1.0 - delta) * 2.0 * free_energy(s, m);
  if (saturated) *saturated = false;
  for (double R : ladder) {
    if (concentration_sup(s, R, m).value > target) return R;
  }
  if (saturated) *saturated = true;
  return ladder.back();
}

std::vector<double> default_radius_ladder(const Grid& g, int rungs) {
  if (rungs < 1) throw std::invalid_argument("ladder needs at least one rung");
  const double cover = covering_radius(g);
  std::vector<double> out(static_cast<std::size_t>(rungs));
  for (int k = 1; k <= rungs; ++k)
    out[static_cast<std::size_t>(k - 1)] = cover * k / rungs;
  return out;
}

void track_center(std::vector<DiagnosticsRecord>& recs, const Grid& g) {
  if (recs.empty()) return;
  if (recs.front().y.empty())
    throw std::invalid_argument("records carry no concentration centers");
  std::vector<double> prev_raw = recs.front().y;
  std::vector<double> lift = recs.front().y;
  for (std::size_t k = 1; k < recs.size(); ++k) {
    auto raw = recs[k].y;
    bool jump = false;
    for (int a = 0; a < g.dim(); ++a) {
      const double d = g.min_image(a, raw[static_cast<std::size_t>(a)] -
                                          prev_raw[static_cast<std::size_t>(a)]);
      lift[static_cast<std::size_t>(a)] += d;
      if (std::abs(d) > 0.25 * g.length(a)) jump = true;
    }
    prev_raw = std::move(raw);
    recs[k].y = lift;
    recs[k].center_jump = jump;
  }
}

void smooth_center(std::vector<DiagnosticsRecord>& recs, double v_cap, int window) {
  if (recs.empty()) return;
  if (recs.front().y.empty())
    throw std::invalid_argument("records carry no concentration centers");
  if (window < 1) window = 1;
  if (!(v_cap > 0.0)) throw std::invalid_argument("v_cap must be positive");
  const std::size_t n = recs.size();
  const std::size_t dim = recs.front().y.size();
  const int h = window / 2;
  std::vector<std::vector<double>> avg(n, std::vector<double>(dim, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k >= static_cast<std::size_t>(h) ? k - h : 0;
    const std::size_t hi = std::min(n - 1, k + static_cast<std::size_t>(h));
    for (std::size_t j = lo; j <= hi; ++j)
      for (std::size_t a = 0; a < dim; ++a) avg[k][a] += recs[j].y[a];
    for (std::size_t a = 0; a < dim; ++a) avg[k][a] /= static_cast<double>(hi - lo + 1);
  }
  recs[0].y_tilde = avg[0];
  for (std::size_t k = 1; k < n; ++k) {
    const double step = recs[k].t - recs[k - 1].t;
    const double cap = v_cap * step;
    std::vector<double> d(dim);
    double norm = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
      d[a] = avg[k][a] - recs[k - 1].y_tilde[a];
      norm += d[a] * d[a];
    }
    norm = std::sqrt(norm);
    const double f = norm > cap ? cap / norm : 1.0;
    recs[k].y_tilde.resize(dim);
    for (std::size_t a = 0; a < dim; ++a)
      recs[k].y_tilde[a] = recs[k - 1].y_tilde[a] + f * d[a];
  }
}

void s_accumulate(std::vector<DiagnosticsRecord>& recs) {
  const auto cum = cumulative_s(recs);
  for (std::size_t k = 0; k < recs.size(); ++k) recs[k].s_cum = cum[k];
}

std::vector<double> window_density(const std::vector<DiagnosticsRecord>& recs,
                                   double tau) {
  if (recs.size() < 2) throw std::invalid_argument("need at least two records");
  const double h = recs[1].t - recs[0].t;
  const long long k = std::llround(tau / h);
  if (k < 1 || std::abs(tau - static_cast<double>(k) * h) > 1e-9 * std::max(1.0, tau))
    throw std::invalid_argument("window must be a positive multiple of the cadence");
  const auto cum = cumulative_s(recs);
  std::vector<double> out;
  for (std::size_t j = 0; j + static_cast<std::size_t>(k) < recs.size();
       j += static_cast<std::size_t>(k))
    out.push_back(cum[j + static_cast<std::size_t>(k)] - cum[j]);
  return out;
}

double mixed_norm(const std::vector<double>& times,
                  const std::vector<EnergyState>& states, double a, double b,
                  double t0, double t1) {
  if (!(a >= 1.0) || !(b >= 1.0))
    throw std::invalid_argument("mixed norm exponents must be >= 1");
  if (times.size() != states.size() || times.size() < 2)
    throw std::invalid_argument("need matching times/states with >= 2 samples");
  const double tol = 0.5 * (times[1] - times[0]);
  std::size_t i0 = times.size(), i1 = times.size();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i] - t0) <= tol && i0 == times.size()) i0 = i;
    if (std::abs(times[i] - t1) <= tol) i1 = i;
  }
  if (i0 == times.size() || i1 == times.size() || i1 < i0)
    throw std::invalid_argument("interval not covered by stored snapshots");
  std::vector<double> sn(i1 - i0 + 1);
  for (std::size_t i = i0; i <= i1; ++i) sn[i - i0] = lp_norm(states[i].u, b);
  if (a == kInfExponent) {
    double mx = 0.0;
    for (double v : sn) mx = std::max(mx, v);
    return mx;
  }
  double acc = 0.0;
  for (std::size_t i = 1; i < sn.size(); ++i) {
    const double h = times[i0 + i] - times[i0 + i - 1];
    acc += 0.5 * h * (std::pow(sn[i - 1], a) + std::pow(sn[i], a));
  }
  return std::pow(acc, 1.0 / a);
}

bool strichartz_admissible(double a, double b, int dim) {
  return 4.0 / a + dim / b <= 0.5 * dim + 1e-12;
}

std::pair<double, double> dual_norm_exponents_low(int dim) {
  const double e = 2.0 * (dim + 2.0) / (dim + 4.0);
  return {e, e};
}

std::pair<double, double> dual_norm_exponents_high(int dim) {
  const double e = 2.0 * (dim + 4.0) / (dim + 8.0);
  return {e, e};
}

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& recs, int dim,
                            const std::vector<std::string>& header_lines) {
  std::string out;
  for (const auto& line : header_lines) out += "# " + line + "\n";
  out += "t,E,E0";
  for (int a = 1; a <= dim; ++a) out += ",Mom_" + std::to_string(a);
  for (int i = 1; i <= dim; ++i)
    for (int j = i + 1; j <= dim; ++j)
      out += ",Omega_" + std::to_string(i) + std::to_string(j);
  out += ",Scum";
  for (int a = 1; a <= dim; ++a) out += ",y_" + std::to_string(a);
  for (int a = 1; a <= dim; ++a) out += ",ytilde_" + std::to_string(a);
  out += ",I2,J,A2,dA2_fd,dA2_rhs_bulk,dA2_rhs_bnd,res_A2,Ia,A,dA_fd,dA_rhs,res_A";
  for (int i = 1; i <= dim; ++i)
    for (int j = i + 1; j <= dim; ++j)
      out += ",R_" + std::to_string(i) + std::to_string(j);
  for (int i = 1; i <= dim; ++i)
    for (int j = i + 1; j <= dim; ++j)
      out += ",res_R_" + std::to_string(i) + std::to_string(j);
  out += "\n";

  const std::size_t npairs = static_cast<std::size_t>(dim * (dim - 1) / 2);
  auto cell = [&](double v) {
    out += ",";
    append_num(out, v);
  };
  for (const auto& r : recs) {
    append_num(out, r.t);
    cell(r.E);
    cell(r.E0);
    for (int a = 0; a < dim; ++a)
      cell(a < static_cast<int>(r.mom.size()) ? r.mom[static_cast<std::size_t>(a)] : kNaN);
    for (std::size_t q = 0; q < npairs; ++q)
      cell(q < r.omega.size() ? r.omega[q] : kNaN);
    cell(r.s_cum);
    for (int a = 0; a < dim; ++a)
      cell(a < static_cast<int>(r.y.size()) ? r.y[static_cast<std::size_t>(a)] : kNaN);
    for (int a = 0; a < dim; ++a)
      cell(a < static_cast<int>(r.y_tilde.size()) ? r.y_tilde[static_cast<std::size_t>(a)]
                                                  : kNaN);
    cell(r.I2);
    cell(r.J);
    cell(r.A2);
    cell(r.dA2_fd);
    cell(r.dA2_rhs_bulk);
    cell(r.dA2_rhs_bnd);
    cell(r.res_A2);
    cell(r.Ia);
    cell(r.A);
    cell(r.dA_fd);
    cell(r.dA_rhs);
    cell(r.res_A);
    for (std::size_t q = 0; q < npairs; ++q)
      cell(q < r.Rij.size() ? r.Rij[q] : kNaN);
    for (std::size_t q = 0; q < npairs; ++q)
      cell(q < r.res_Rij.size() ? r.res_Rij[q] : kNaN);
    out += "\n";
  }
  return out;
}

}  // namespace beam
