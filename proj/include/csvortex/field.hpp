#pragma once

// Periodic scalar fields on the unit torus [0,1)^2, sampled on a uniform
// n x n grid. Value (i,j) is the sample at (i*h, j*h) with h = 1/n; storage
// is row-major in i.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "csvortex/core.hpp"

namespace csvortex {

struct Grid {
  int n = 0;
  double h = 0.0;

  Grid() = default;
  explicit Grid(int n_) : n(n_), h(1.0 / n_) {
    if (n_ < 16 || n_ % 2 != 0)
      throw std::invalid_argument("Grid: n must be even and >= 16, got " +
                                  std::to_string(n_));
  }

  bool operator==(const Grid& o) const { return n == o.n; }
  std::size_t size() const { return static_cast<std::size_t>(n) * n; }
  Vec2 point(int i, int j) const { return {i * h, j * h}; }
};

class Field {
 public:
  Field() = default;
  explicit Field(Grid g, double fill = 0.0) : grid_(g), v_(g.size(), fill) {}

  const Grid& grid() const { return grid_; }
  int n() const { return grid_.n; }

  double& operator()(int i, int j) { return v_[idx(i, j)]; }
  double operator()(int i, int j) const { return v_[idx(i, j)]; }

  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  /// Sample a function of position on every grid node.
  static Field sample(Grid g, const std::function<double(Vec2)>& f) {
    Field out(g);
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j) out(i, j) = f(g.point(i, j));
    return out;
  }

  bool all_finite() const {
    return std::all_of(v_.begin(), v_.end(),
                       [](double x) { return std::isfinite(x); });
  }

  double max() const { return *std::max_element(v_.begin(), v_.end()); }
  double min() const { return *std::min_element(v_.begin(), v_.end()); }
  double sup_norm() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

  Field& operator+=(const Field& o) { return zip(o, std::plus<double>{}); }
  Field& operator-=(const Field& o) { return zip(o, std::minus<double>{}); }
  Field& operator*=(double a) {
    for (double& x : v_) x *= a;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double a, Field f) { return f *= a; }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * grid_.n + j;
  }
  template <class Op>
  Field& zip(const Field& o, Op op) {
    require_same_grid(o);
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] = op(v_[k], o.v_[k]);
    return *this;
  }
  void require_same_grid(const Field& o) const {
    if (!(grid_ == o.grid_))
      throw std::invalid_argument("Field: grids do not match");
  }

  Grid grid_;
  std::vector<double> v_;
};

/// Fourier coefficients of a Field; index m in [0,n)^2 carries integer wave
/// vector k(m) = m for m < n/2 and m - n otherwise, so k in [-n/2, n/2)^2.
/// Coefficient at k = 0 equals the mean of the field.
struct SpectralField {
  Grid grid;
  std::vector<std::complex<double>> coeff;

  SpectralField() = default;
  explicit SpectralField(Grid g) : grid(g), coeff(g.size()) {}

  std::complex<double>& at(int mi, int mj) {
    return coeff[static_cast<std::size_t>(mi) * grid.n + mj];
  }
  std::complex<double> at(int mi, int mj) const {
    return coeff[static_cast<std::size_t>(mi) * grid.n + mj];
  }

  int wavenumber(int m) const { return m < grid.n / 2 ? m : m - grid.n; }
};

/// Compensated (Kahan) sum; keeps quadrature error at rounding level even
/// for n^2 ~ 10^6 samples.
inline double kahan_sum(const std::vector<double>& v) {
  double s = 0.0, c = 0.0;
  for (double x : v) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

/// h^2 * sum of samples; exact trapezoid rule for periodic smooth fields.
inline double integrate(const Field& f) {
  return f.grid().h * f.grid().h * kahan_sum(f.values());
}

inline double mean(const Field& f) { return kahan_sum(f.values()) / f.grid().size(); }

/// Discrete L2 inner product <f,g> = h^2 sum f g.
inline double inner(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument("inner: grids do not match");
  double s = 0.0, c = 0.0;
  const auto& va = a.values();
  const auto& vb = b.values();
  for (std::size_t k = 0; k < va.size(); ++k) {
    double y = va[k] * vb[k] - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return a.grid().h * a.grid().h * s;
}

inline double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }

}  // namespace csvortex
