//==============================================================================
// grid.hpp
// Periodic box discretization and the Field container.
// A Grid describes an n-dimensional periodic box (1 <= n <= 4) sampled on a
// uniform lattice; a Field holds either real point samples or complex spectral
// coefficients on that grid, with an explicit representation flag.
//
// Conventions (used throughout the project):
//   * samples are stored row-major, axis 0 slowest, last axis fastest
//   * coordinates: x_a = (L_a / N_a) * i for i in [0, N_a)
//   * wavenumbers: xi_a = (2*pi/L_a) * k with k in FFT order
//     {0, 1, ..., N/2-1, -N/2, ..., -1}
//==============================================================================
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace beam {

inline constexpr int kMaxDim = 4;

class Grid {
 public:
  // Axis counts must be even, >= 8, and 3-smooth (2^a * 3^b); lengths > 0.
  Grid(std::vector<int> points, std::vector<double> lengths);

  int dim() const { return dim_; }
  int points(int axis) const { return points_[axis]; }
  double length(int axis) const { return lengths_[axis]; }
  std::size_t size() const { return size_; }

  double cell_volume() const { return cell_volume_; }  // dx = prod(L_a / N_a)
  double volume() const { return volume_; }            // prod(L_a)

  // Signed lattice index for storage index idx on an axis: value in [-N/2, N/2).
  int signed_index(int axis, int idx) const {
    const int n = points_[axis];
    return idx < n / 2 ? idx : idx - n;
  }
  // Wavenumber xi_a for storage index idx.
  double wavenumber(int axis, int idx) const {
    return wavenumbers_[axis][static_cast<std::size_t>(idx)];
  }
  // Spatial coordinate for storage index idx.
  double coordinate(int axis, int idx) const {
    return lengths_[axis] / points_[axis] * idx;
  }

  // Smallest nonzero |xi| on the lattice (2*pi / max L) and the lattice corner
  // |xi| (Euclidean norm of the per-axis Nyquist values).
  double min_wavenumber() const;
  double max_wavenumber() const;

  // 2/3-rule dealiasing: modes with |signed index| > floor(N/3) are dropped.
  int dealias_limit(int axis) const { return points_[axis] / 3; }
  bool mode_dealiased(std::span<const int> kidx) const {
    for (int a = 0; a < dim_; ++a)
      if (std::abs(kidx[a]) > dealias_limit(a)) return true;
    return false;
  }

  // Periodic displacement d = x - y reduced per axis into [-L/2, L/2).
  double min_image(int axis, double d) const;

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && points_ == o.points_ && lengths_ == o.lengths_;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }

  // Decompose a flat storage index into per-axis indices.
  void unflatten(std::size_t flat, int* idx) const {
    for (int a = dim_ - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(flat % points_[a]);
      flat /= points_[a];
    }
  }

  // Visit every lattice mode: fn(flat, xi[dim], kidx[dim]).  Used for
  // multiplier construction; the loop carries the indices incrementally.
  template <class Fn>
  void for_each_mode(Fn&& fn) const {
    std::array<int, kMaxDim> idx{};
    std::array<int, kMaxDim> kidx{};
    std::array<double, kMaxDim> xi{};
    for (int a = 0; a < dim_; ++a) {
      kidx[a] = 0;
      xi[a] = wavenumbers_[a][0];
    }
    const std::size_t total = size_;
    for (std::size_t flat = 0; flat < total; ++flat) {
      fn(flat, std::span<const double>(xi.data(), dim_),
         std::span<const int>(kidx.data(), dim_));
      for (int a = dim_ - 1; a >= 0; --a) {
        if (++idx[a] < points_[a]) {
          kidx[a] = signed_index(a, idx[a]);
          xi[a] = wavenumbers_[a][static_cast<std::size_t>(idx[a])];
          break;
        }
        idx[a] = 0;
        kidx[a] = 0;
        xi[a] = wavenumbers_[a][0];
      }
    }
  }

  // Visit every sample point: fn(flat, x[dim]).
  template <class Fn>
  void for_each_point(Fn&& fn) const {
    std::array<int, kMaxDim> idx{};
    std::array<double, kMaxDim> x{};
    const std::size_t total = size_;
    for (std::size_t flat = 0; flat < total; ++flat) {
      for (int a = 0; a < dim_; ++a) x[a] = coordinate(a, idx[a]);
      fn(flat, std::span<const double>(x.data(), dim_));
      for (int a = dim_ - 1; a >= 0; --a) {
        if (++idx[a] < points_[a]) break;
        idx[a] = 0;
      }
    }
  }

 private:
  int dim_ = 0;
  std::vector<int> points_;
  std::vector<double> lengths_;
  std::vector<std::vector<double>> wavenumbers_;  // per axis, FFT order
  std::size_t size_ = 0;
  double cell_volume_ = 0.0;
  double volume_ = 0.0;
};

enum class Rep { physical, spectral };

// Real field on a Grid.  Physical representation stores real samples;
// spectral stores the full complex coefficient lattice (conjugate-symmetric
// for real fields; realness is restored by to_physical, which keeps the real
// part of the inverse transform).
class Field {
 public:
  Field(Grid grid, Rep rep);
  static Field zeros(const Grid& g, Rep rep = Rep::physical) {
    return Field(g, rep);
  }
  static Field from_samples(const Grid& g, std::vector<double> samples);
  static Field from_function(
      const Grid& g, const std::function<double(std::span<const double>)>& f);

  const Grid& grid() const { return grid_; }
  Rep rep() const { return rep_; }
  bool is_physical() const { return rep_ == Rep::physical; }

  std::vector<double>& samples();
  const std::vector<double>& samples() const;
  std::vector<std::complex<double>>& coeffs();
  const std::vector<std::complex<double>>& coeffs() const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double c);

 private:
  Grid grid_;
  Rep rep_;
  std::vector<double> samples_;
  std::vector<std::complex<double>> coeffs_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double c, Field a);

// Throws std::invalid_argument unless both fields live on the same grid.
void require_same_grid(const Field& a, const Field& b);

}  // namespace beam
