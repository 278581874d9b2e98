//==============================================================================
// grid.cpp — Grid validation/bookkeeping and the Field container.
//==============================================================================
#include "beam/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace beam {

namespace {

bool three_smooth(int n) {
  while (n % 2 == 0) n /= 2;
  while (n % 3 == 0) n /= 3;
  return n == 1;
}

}  // namespace

Grid::Grid(std::vector<int> points, std::vector<double> lengths) {
  if (points.empty() || points.size() > kMaxDim)
    throw std::invalid_argument("grid dimension must be between 1 and 4");
  if (lengths.size() != points.size())
    throw std::invalid_argument("grid points/lengths dimension mismatch");
  dim_ = static_cast<int>(points.size());
  for (int a = 0; a < dim_; ++a) {
    const int n = points[static_cast<std::size_t>(a)];
    if (n < 8 || n % 2 != 0 || !three_smooth(n))
      throw std::invalid_argument(
          "axis count " + std::to_string(n) +
          " not supported: counts must be even, >= 8, and of the form 2^a*3^b");
    if (!(lengths[static_cast<std::size_t>(a)] > 0.0))
      throw std::invalid_argument("axis length must be positive");
  }
  points_ = std::move(points);
  lengths_ = std::move(lengths);
  size_ = 1;
  cell_volume_ = 1.0;
  volume_ = 1.0;
  wavenumbers_.resize(static_cast<std::size_t>(dim_));
  for (int a = 0; a < dim_; ++a) {
    const int n = points_[static_cast<std::size_t>(a)];
    const double L = lengths_[static_cast<std::size_t>(a)];
    size_ *= static_cast<std::size_t>(n);
    cell_volume_ *= L / n;
    volume_ *= L;
    auto& w = wavenumbers_[static_cast<std::size_t>(a)];
    w.resize(static_cast<std::size_t>(n));
    const double base = 2.0 * std::numbers::pi / L;
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = base * signed_index(a, i);
  }
}

double Grid::min_wavenumber() const {
  double lmax = 0.0;
  for (int a = 0; a < dim_; ++a) lmax = std::max(lmax, lengths_[static_cast<std::size_t>(a)]);
  return 2.0 * std::numbers::pi / lmax;
}

double Grid::max_wavenumber() const {
  double s = 0.0;
  for (int a = 0; a < dim_; ++a) {
    const double nyq = std::numbers::pi * points_[static_cast<std::size_t>(a)] /
                       lengths_[static_cast<std::size_t>(a)];
    s += nyq * nyq;
  }
  return std::sqrt(s);
}

double Grid::min_image(int axis, double d) const {
  const double L = lengths_[static_cast<std::size_t>(axis)];
  d = std::fmod(d, L);
  if (d < -0.5 * L) d += L;
  if (d >= 0.5 * L) d -= L;
  return d;
}

Field::Field(Grid grid, Rep rep) : grid_(std::move(grid)), rep_(rep) {
  if (rep_ == Rep::physical)
    samples_.assign(grid_.size(), 0.0);
  else
    coeffs_.assign(grid_.size(), {0.0, 0.0});
}

Field Field::from_samples(const Grid& g, std::vector<double> samples) {
  if (samples.size() != g.size())
    throw std::invalid_argument("sample count does not match grid size");
  Field f(g, Rep::physical);
  f.samples_ = std::move(samples);
  return f;
}

Field Field::from_function(
    const Grid& g, const std::function<double(std::span<const double>)>& fn) {
  Field f(g, Rep::physical);
  auto& s = f.samples_;
  g.for_each_point([&](std::size_t flat, std::span<const double> x) { s[flat] = fn(x); });
  return f;
}

std::vector<double>& Field::samples() {
  if (rep_ != Rep::physical)
    throw std::logic_error("field is in spectral representation");
  return samples_;
}
const std::vector<double>& Field::samples() const {
  if (rep_ != Rep::physical)
    throw std::logic_error("field is in spectral representation");
  return samples_;
}
std::vector<std::complex<double>>& Field::coeffs() {
  if (rep_ != Rep::spectral)
    throw std::logic_error("field is in physical representation");
  return coeffs_;
}
const std::vector<std::complex<double>>& Field::coeffs() const {
  if (rep_ != Rep::spectral)
    throw std::logic_error("field is in physical representation");
  return coeffs_;
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(*this, o);
  if (rep_ != o.rep_) throw std::logic_error("representation mismatch in field sum");
  if (rep_ == Rep::physical)
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += o.samples_[i];
  else
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(*this, o);
  if (rep_ != o.rep_) throw std::logic_error("representation mismatch in field difference");
  if (rep_ == Rep::physical)
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] -= o.samples_[i];
  else
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

Field& Field::operator*=(double c) {
  if (rep_ == Rep::physical)
    for (auto& v : samples_) v *= c;
  else
    for (auto& v : coeffs_) v *= c;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double c, Field a) { return a *= c; }

void require_same_grid(const Field& a, const Field& b) {
  if (a.grid() != b.grid())
    throw std::invalid_argument("fields live on different grids");
}

}  // namespace beam
