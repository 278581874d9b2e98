//==============================================================================
// frame.cpp — three-shear rotations and momentum alignment.
//==============================================================================
#include "beam/frame.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "beam/solver.hpp"
#include "beam/spectral.hpp"

namespace beam {

namespace {

// 1D complex line transforms with their own small plan cache.
struct LinePlan {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  fftw_complex* buf = nullptr;
  int n = 0;
  ~LinePlan() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (buf) fftw_free(buf);
  }
};

std::mutex g_line_mutex;
std::map<int, std::unique_ptr<LinePlan>> g_line_plans;

LinePlan& line_plan(int n) {
  auto it = g_line_plans.find(n);
  if (it != g_line_plans.end()) return *it->second;
  auto lp = std::make_unique<LinePlan>();
  lp->n = n;
  lp->buf = fftw_alloc_complex(static_cast<std::size_t>(n));
  lp->fwd = fftw_plan_dft_1d(n, lp->buf, lp->buf, FFTW_FORWARD, FFTW_ESTIMATE);
  lp->bwd = fftw_plan_dft_1d(n, lp->buf, lp->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!lp->fwd || !lp->bwd) throw std::runtime_error("FFTW line plan creation failed");
  auto& ref = *lp;
  g_line_plans.emplace(n, std::move(lp));
  return ref;
}

// Translate the field along `axis` by shift(x) = alpha * w_ref(x), where
// w_ref is the centered (minimal-image about L/2) coordinate of axis_ref.
Field shear_field(const Field& f, int axis, int axis_ref, double alpha) {
  const Grid& g = f.grid();
  Field out = ensure_physical(f);
  auto& s = out.samples();
  const int na = g.points(axis);
  const double La = g.length(axis);
  const double base = 2.0 * std::numbers::pi / La;

  // Row-major strides.
  std::size_t stride = 1;
  for (int a = g.dim() - 1; a > axis; --a) stride *= static_cast<std::size_t>(g.points(a));

  std::lock_guard<std::mutex> lock(g_line_mutex);
  LinePlan& lp = line_plan(na);
  int idx[kMaxDim] = {0, 0, 0, 0};
  for (std::size_t base_flat = 0; base_flat < g.size(); ++base_flat) {
    // Visit each line once: skip flats that are not at line start.
    if ((base_flat / stride) % static_cast<std::size_t>(na) != 0) continue;
    g.unflatten(base_flat, idx);
    const double wref = g.min_image(
        axis_ref, g.coordinate(axis_ref, idx[axis_ref]) - 0.5 * g.length(axis_ref));
    const double shift = alpha * wref;
    for (int i = 0; i < na; ++i) {
      lp.buf[i][0] = s[base_flat + static_cast<std::size_t>(i) * stride];
      lp.buf[i][1] = 0.0;
    }
    fftw_execute(lp.fwd);
    for (int i = 0; i < na; ++i) {
      const int k = i < na / 2 ? i : i - na;
      if (k == -na / 2) {
        lp.buf[i][0] = 0.0;  // unpaired mode cannot carry a fractional shift
        lp.buf[i][1] = 0.0;
        continue;
      }
      const double phase = -base * k * shift;
      const std::complex<double> rot(std::cos(phase), std::sin(phase));
      const std::complex<double> c(lp.buf[i][0], lp.buf[i][1]);
      const std::complex<double> r = c * rot;
      lp.buf[i][0] = r.real();
      lp.buf[i][1] = r.imag();
    }
    fftw_execute(lp.bwd);
    const double scale = 1.0 / na;
    for (int i = 0; i < na; ++i)
      s[base_flat + static_cast<std::size_t>(i) * stride] = lp.buf[i][0] * scale;
  }
  return out;
}

// Exact +90 degree lattice rotation in the (a, b) plane about the center.
Field quarter_turn(const Field& f, int axis_a, int axis_b) {
  const Grid& g = f.grid();
  if (g.points(axis_a) != g.points(axis_b) || g.length(axis_a) != g.length(axis_b))
    throw std::invalid_argument("quarter turns need matching axes (points and length)");
  const Field src = ensure_physical(f);
  Field out(g, Rep::physical);
  const auto& in = src.samples();
  auto& o = out.samples();
  const int n = g.points(axis_a);
  int idx[kMaxDim];
  std::vector<std::size_t> strides(static_cast<std::size_t>(g.dim()), 1);
  for (int a = g.dim() - 2; a >= 0; --a)
    strides[static_cast<std::size_t>(a)] =
        strides[static_cast<std::size_t>(a + 1)] * static_cast<std::size_t>(g.points(a + 1));
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    g.unflatten(flat, idx);
    const int ia = idx[axis_a];
    const int ib = idx[axis_b];
    idx[axis_a] = ib;
    idx[axis_b] = (n - ia) % n;
    std::size_t src_flat = 0;
    for (int a = 0; a < g.dim(); ++a)
      src_flat += static_cast<std::size_t>(idx[a]) * strides[static_cast<std::size_t>(a)];
    o[flat] = in[src_flat];
  }
  return out;
}

}  // namespace

Field rotate_field(const Field& f, int axis_a, int axis_b, double theta) {
  const Grid& g = f.grid();
  if (axis_a == axis_b || axis_a < 0 || axis_b < 0 || axis_a >= g.dim() ||
      axis_b >= g.dim())
    throw std::invalid_argument("rotation needs two distinct axes in range");
  const double quarter = 0.5 * std::numbers::pi;
  long long q = std::llround(theta / quarter);
  double rest = theta - static_cast<double>(q) * quarter;
  // Keep the shear angle within [-pi/4, pi/4] so tan(theta/2) stays small.
  Field cur = ensure_physical(f);
  q = ((q % 4) + 4) % 4;
  for (long long i = 0; i < q; ++i) cur = quarter_turn(cur, axis_a, axis_b);
  if (rest != 0.0) {
    const double tau = -std::tan(0.5 * rest);
    const double sig = std::sin(rest);
    cur = shear_field(cur, axis_a, axis_b, tau);
    cur = shear_field(cur, axis_b, axis_a, sig);
    cur = shear_field(cur, axis_a, axis_b, tau);
  }
  return cur;
}

EnergyState rotate_state(const EnergyState& s, int axis_a, int axis_b, double theta) {
  return EnergyState(rotate_field(s.u, axis_a, axis_b, theta),
                     rotate_field(s.v, axis_a, axis_b, theta));
}

FrameAlignment align_momentum_frame(EnergyState& s, double m, double tol) {
  FrameAlignment out;
  out.mom_before = momentum(s);
  const int n = s.grid().dim();
  double mom_norm = 0.0;
  for (double v : out.mom_before) mom_norm += v * v;
  mom_norm = std::sqrt(mom_norm);
  const double scale = std::max(free_energy(s, m), 1e-300);
  if (mom_norm <= tol * scale || n < 2) {
    out.rotated = false;
    out.mom_after = out.mom_before;
    return out;
  }
  for (int j = 1; j < n; ++j) {
    const auto mom = momentum(s);
    const double mj = mom[static_cast<std::size_t>(j)];
    const double m0 = mom[0];
    if (mj == 0.0) continue;
    const double theta = -std::atan2(mj, m0);
    s = rotate_state(s, 0, j, theta);
    out.steps.push_back({0, j, theta});
  }
  out.rotated = true;
  out.mom_after = momentum(s);
  return out;
}

}  // namespace beam
