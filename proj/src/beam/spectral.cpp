//==============================================================================
// spectral.cpp — FFTW-backed transforms and frequency-space operations.
//
// Plans are cached per grid shape and created with FFTW_ESTIMATE only: the
// heuristic planner is deterministic, so repeated runs execute the same
// algorithm and produce bit-identical output.  Plan creation and execution
// are serialized behind one mutex; callers may treat every function here as
// thread-safe.
//==============================================================================
#include "beam/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <optional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace beam {

namespace {

struct PlanSet {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  std::size_t n = 0;

  ~PlanSet() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (in) fftw_free(in);
    if (out) fftw_free(out);
  }
};

std::mutex g_fft_mutex;
std::map<std::vector<int>, std::unique_ptr<PlanSet>> g_plans;

PlanSet& plan_for(const Grid& g) {
  std::vector<int> key(static_cast<std::size_t>(g.dim()));
  for (int a = 0; a < g.dim(); ++a) key[static_cast<std::size_t>(a)] = g.points(a);
  auto it = g_plans.find(key);
  if (it != g_plans.end()) return *it->second;

  auto ps = std::make_unique<PlanSet>();
  ps->n = g.size();
  ps->in = fftw_alloc_complex(ps->n);
  ps->out = fftw_alloc_complex(ps->n);
  ps->forward = fftw_plan_dft(g.dim(), key.data(), ps->in, ps->out,
                              FFTW_FORWARD, FFTW_ESTIMATE);
  ps->backward = fftw_plan_dft(g.dim(), key.data(), ps->in, ps->out,
                               FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!ps->forward || !ps->backward)
    throw std::runtime_error("FFTW plan creation failed");
  auto& ref = *ps;
  g_plans.emplace(std::move(key), std::move(ps));
  return ref;
}

}  // namespace

Field to_spectral(const Field& f) {
  if (f.rep() != Rep::physical)
    throw std::logic_error("to_spectral expects a physical-representation field");
  const Grid& g = f.grid();
  Field out(g, Rep::spectral);
  const auto& s = f.samples();
  auto& c = out.coeffs();
  {
    std::lock_guard<std::mutex> lock(g_fft_mutex);
    PlanSet& ps = plan_for(g);
    for (std::size_t i = 0; i < ps.n; ++i) {
      ps.in[i][0] = s[i];
      ps.in[i][1] = 0.0;
    }
    fftw_execute(ps.forward);
    const double scale = 1.0 / static_cast<double>(ps.n);
    for (std::size_t i = 0; i < ps.n; ++i)
      c[i] = {ps.out[i][0] * scale, ps.out[i][1] * scale};
  }
  return out;
}

Field to_physical(const Field& f) {
  if (f.rep() != Rep::spectral)
    throw std::logic_error("to_physical expects a spectral-representation field");
  const Grid& g = f.grid();
  Field out(g, Rep::physical);
  const auto& c = f.coeffs();
  auto& s = out.samples();
  {
    std::lock_guard<std::mutex> lock(g_fft_mutex);
    PlanSet& ps = plan_for(g);
    for (std::size_t i = 0; i < ps.n; ++i) {
      ps.in[i][0] = c[i].real();
      ps.in[i][1] = c[i].imag();
    }
    fftw_execute(ps.backward);
    // Real fields are conjugate-symmetric; any imaginary residue is roundoff
    // (or an intentionally asymmetric multiplier) and is dropped here.
    for (std::size_t i = 0; i < ps.n; ++i) s[i] = ps.out[i][0];
  }
  return out;
}

Field ensure_spectral(const Field& f) {
  return f.rep() == Rep::spectral ? f : to_spectral(f);
}
Field ensure_physical(const Field& f) {
  return f.rep() == Rep::physical ? f : to_physical(f);
}

Field apply_multiplier(const Field& f, const Multiplier& sigma) {
  const bool was_physical = f.is_physical();
  Field spec = ensure_spectral(f);
  auto& c = spec.coeffs();
  bool bad = false;
  double bad_xi[kMaxDim] = {0, 0, 0, 0};
  f.grid().for_each_mode([&](std::size_t flat, std::span<const double> xi,
                             std::span<const int>) {
    const double v = sigma(xi);
    if (!std::isfinite(v) && !bad) {
      bad = true;
      for (int a = 0; a < f.grid().dim(); ++a) bad_xi[a] = xi[a];
    }
    c[flat] *= v;
  });
  if (bad) {
    std::string where = "(";
    for (int a = 0; a < f.grid().dim(); ++a)
      where += (a ? ", " : "") + std::to_string(bad_xi[a]);
    throw std::invalid_argument("multiplier is not finite at xi = " + where + ")");
  }
  return was_physical ? to_physical(spec) : spec;
}

Field derivative(const Field& f, int axis) {
  if (axis < 0 || axis >= f.grid().dim())
    throw std::invalid_argument("derivative axis out of range");
  const bool was_physical = f.is_physical();
  Field spec = ensure_spectral(f);
  auto& c = spec.coeffs();
  const Grid& g = f.grid();
  const int nyq = -g.points(axis) / 2;
  g.for_each_mode([&](std::size_t flat, std::span<const double> xi,
                      std::span<const int> k) {
    if (k[axis] == nyq) {
      c[flat] = 0.0;  // unpaired mode: i*xi would break conjugate symmetry
    } else {
      c[flat] *= std::complex<double>(0.0, xi[axis]);
    }
  });
  return was_physical ? to_physical(spec) : spec;
}

Field laplacian(const Field& f) {
  return apply_multiplier(f, [](std::span<const double> xi) {
    double s = 0.0;
    for (double v : xi) s += v * v;
    return -s;
  });
}

Field fractional_derivative(const Field& f, double s) {
  if (!(s > -4.0 && s < 4.0))
    throw std::invalid_argument("fractional derivative order must lie in (-4, 4)");
  if (s == 0.0) return f;
  return apply_multiplier(f, [s](std::span<const double> xi) {
    double q = 0.0;
    for (double v : xi) q += v * v;
    if (q == 0.0) return 0.0;  // mean mode: |xi|^s = 0 for s > 0, zeroed for s < 0
    return std::pow(q, 0.5 * s);
  });
}

Field dealias(const Field& f) {
  const bool was_physical = f.is_physical();
  Field spec = ensure_spectral(f);
  auto& c = spec.coeffs();
  const Grid& g = f.grid();
  g.for_each_mode([&](std::size_t flat, std::span<const double>,
                      std::span<const int> k) {
    if (g.mode_dealiased(k)) c[flat] = 0.0;
  });
  return was_physical ? to_physical(spec) : spec;
}

namespace {

// Borrow the physical samples, converting only when needed.
class PhysicalView {
 public:
  explicit PhysicalView(const Field& f) {
    if (f.is_physical()) {
      ptr_ = &f;
    } else {
      own_.emplace(to_physical(f));
      ptr_ = &*own_;
    }
  }
  const std::vector<double>& samples() const { return ptr_->samples(); }

 private:
  std::optional<Field> own_;
  const Field* ptr_ = nullptr;
};

}  // namespace

double lp_norm(const Field& f, double q) {
  if (q < 1.0) throw std::invalid_argument("lp_norm exponent must be >= 1");
  const PhysicalView view(f);
  const auto& s = view.samples();
  if (q == kInfExponent) {
    double m = 0.0;
    for (double v : s) m = std::max(m, std::abs(v));
    return m;
  }
  const double dx = f.grid().cell_volume();
  double acc = 0.0;
  if (q == 2.0) {
    for (double v : s) acc += v * v;
  } else {
    for (double v : s) acc += std::pow(std::abs(v), q);
  }
  return std::pow(acc * dx, 1.0 / q);
}

double sobolev_norm(const Field& f, double s) {
  return lp_norm(fractional_derivative(ensure_spectral(f), s), 2.0);
}

double integrate(const Field& f) {
  const PhysicalView view(f);
  const auto& s = view.samples();
  double acc = 0.0;
  for (double v : s) acc += v;
  return acc * f.grid().cell_volume();
}

double inner(const Field& f, const Field& g) {
  require_same_grid(f, g);
  const PhysicalView fv(f);
  const PhysicalView gv(g);
  const auto& a = fv.samples();
  const auto& b = gv.samples();
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc * f.grid().cell_volume();
}

}  // namespace beam
