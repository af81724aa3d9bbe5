#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <vector>

#include "mfchaos/errors.hpp"

namespace mfchaos {

/// Uniform 1D grid with nx nodes spanning [x_min, x_max] inclusive.
struct Grid1D {
  double x_min;
  double x_max;
  int nx;
  double dx;

  Grid1D(double xmin, double xmax, int n) : x_min(xmin), x_max(xmax), nx(n) {
    if (!(x_min < x_max)) throw ValidationError("grid.x_min", "must be < grid.x_max");
    if (nx < 16) throw ValidationError("grid.nx", "must be >= 16");
    dx = (x_max - x_min) / double(nx - 1);
  }

  double node(int i) const { return x_min + dx * double(i); }

  bool operator==(const Grid1D& o) const {
    return x_min == o.x_min && x_max == o.x_max && nx == o.nx;
  }
};

/// A density sampled at grid nodes.
struct DensityField {
  Grid1D grid;
  std::vector<double> values;
  double time_stamp = 0.0;
};

struct Norms {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double h1_seminorm = 0.0;
  double h1 = 0.0;
};

inline double trapz(const Grid1D& g, std::span<const double> f) {
  double s = 0.0;
  for (double v : f) s += v;
  s -= 0.5 * (f.front() + f.back());
  return s * g.dx;
}

/// First derivative, second-order central with one-sided second-order ends.
inline std::vector<double> gradient(const Grid1D& g, std::span<const double> f) {
  const int n = g.nx;
  std::vector<double> d(n);
  const double inv2 = 1.0 / (2.0 * g.dx);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2;
  for (int i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) * inv2;
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2;
  return d;
}

/// Second derivative, central in the interior, one-sided second-order ends.
inline std::vector<double> second_derivative(const Grid1D& g, std::span<const double> f) {
  const int n = g.nx;
  std::vector<double> d(n);
  const double inv = 1.0 / (g.dx * g.dx);
  d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * inv;
  for (int i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * inv;
  d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * inv;
  return d;
}

inline Norms norms(const DensityField& u) {
  Norms out;
  const int n = u.grid.nx;
  std::vector<double> abs_u(n), sq(n);
  for (int i = 0; i < n; ++i) {
    abs_u[i] = std::abs(u.values[i]);
    sq[i] = u.values[i] * u.values[i];
    out.linf = std::max(out.linf, abs_u[i]);
  }
  out.l1 = trapz(u.grid, abs_u);
  const double l2sq = trapz(u.grid, sq);
  out.l2 = std::sqrt(std::max(0.0, l2sq));
  std::vector<double> d = gradient(u.grid, u.values);
  for (double& v : d) v *= v;
  const double h1sq = trapz(u.grid, d);
  out.h1_seminorm = std::sqrt(std::max(0.0, h1sq));
  out.h1 = std::sqrt(std::max(0.0, l2sq + h1sq));
  return out;
}

/// Integral of the positive part (u - m)^+.
inline double excess_mass(const DensityField& u, double m) {
  if (m < 0.0) throw ValidationError("m", "must be >= 0");
  std::vector<double> w(u.values.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::max(0.0, u.values[i] - m);
  return trapz(u.grid, w);
}

/// Gaussian pdf on the grid, rescaled to unit trapezoidal mass.
inline DensityField gaussian_field(const Grid1D& g, double mean, double sd) {
  if (!(sd > 0.0)) throw ValidationError("init.sd", "must be > 0");
  DensityField u{g, std::vector<double>(g.nx), 0.0};
  const double c = 1.0 / (sd * std::sqrt(2.0 * std::acos(-1.0)));
  for (int i = 0; i < g.nx; ++i) {
    const double z = (g.node(i) - mean) / sd;
    u.values[i] = c * std::exp(-0.5 * z * z);
  }
  const double mass = trapz(g, u.values);
  for (double& v : u.values) v /= mass;
  return u;
}

/// Top-hat of the given width, cell-overlap discretized, unit mass.
inline DensityField plateau_field(const Grid1D& g, double center, double width) {
  if (!(width > 0.0)) throw ValidationError("init.width", "must be > 0");
  DensityField u{g, std::vector<double>(g.nx, 0.0), 0.0};
  const double lo = center - 0.5 * width, hi = center + 0.5 * width;
  for (int i = 0; i < g.nx; ++i) {
    const double a = g.node(i) - 0.5 * g.dx, b = g.node(i) + 0.5 * g.dx;
    const double overlap = std::max(0.0, std::min(b, hi) - std::max(a, lo));
    u.values[i] = overlap / (g.dx * width);
  }
  const double mass = trapz(g, u.values);
  if (!(mass > 0.0)) throw ValidationError("init.width", "plateau lies outside the grid");
  for (double& v : u.values) v /= mass;
  return u;
}

/// Linear interpolation onto another grid; zero outside the source domain.
inline DensityField resample(const DensityField& u, const Grid1D& g) {
  DensityField out{g, std::vector<double>(g.nx, 0.0), u.time_stamp};
  for (int i = 0; i < g.nx; ++i) {
    const double x = g.node(i);
    if (x < u.grid.x_min || x > u.grid.x_max) continue;
    const double s = (x - u.grid.x_min) / u.grid.dx;
    const int j = std::min(int(s), u.grid.nx - 2);
    const double w = s - double(j);
    out.values[i] = (1.0 - w) * u.values[j] + w * u.values[j + 1];
  }
  return out;
}

inline double l2_distance(const DensityField& a, const DensityField& b) {
  if (!(a.grid == b.grid)) throw ValidationError("grid", "fields must share a grid");
  std::vector<double> d(a.values.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double w = a.values[i] - b.values[i];
    d[i] = w * w;
  }
  return std::sqrt(std::max(0.0, trapz(a.grid, d)));
}

/// Inverse of the trapezoidal CDF by monotone linear interpolation.
/// Piecewise-linear CDF matches the piecewise-constant-cell density reading.
class DensityQuantile {
 public:
  explicit DensityQuantile(const DensityField& u) : grid_(u.grid), cdf_(u.grid.nx, 0.0) {
    for (int i = 1; i < grid_.nx; ++i)
      cdf_[i] = cdf_[i - 1] + 0.5 * grid_.dx * (u.values[i] + u.values[i - 1]);
    mass_ = cdf_.back();
    if (!(mass_ > 0.0)) throw EmptyInput("density has nonpositive total mass");
    for (double& c : cdf_) c /= mass_;
    cdf_.back() = 1.0;
  }

  double mass() const { return mass_; }

  double operator()(double p) const {
    p = std::clamp(p, 0.0, 1.0);
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), p);
    int j = int(it - cdf_.begin());
    if (j == 0) return grid_.node(0);
    const double c0 = cdf_[j - 1], c1 = cdf_[j];
    if (c1 <= c0) return grid_.node(j - 1);
    const double w = (p - c0) / (c1 - c0);
    return grid_.node(j - 1) + w * grid_.dx;
  }

 private:
  Grid1D grid_;
  std::vector<double> cdf_;
  double mass_ = 0.0;
};

namespace detail {
inline void print_csv_double(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}
}  // namespace detail

/// Snapshot CSV with columns t,x,u, one row per node per snapshot.
inline void write_density_csv(std::ostream& os, std::span<const DensityField> snapshots) {
  os << "t,x,u\n";
  for (const DensityField& u : snapshots) {
    for (int i = 0; i < u.grid.nx; ++i) {
      detail::print_csv_double(os, u.time_stamp);
      os << ',';
      detail::print_csv_double(os, u.grid.node(i));
      os << ',';
      detail::print_csv_double(os, u.values[i]);
      os << '\n';
    }
  }
}

}  // namespace mfchaos
