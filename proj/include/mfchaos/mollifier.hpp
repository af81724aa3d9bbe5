#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "mfchaos/errors.hpp"
#include "mfchaos/grid.hpp"

namespace mfchaos {

enum class KernelShape {
  Bump,     // exp(-1/(1-x^2)) on (-1,1), C_c^infinity
  Quartic,  // (1-x^2)^2 on [-1,1], C^1, cheaper to evaluate
};

namespace detail {

// 16-point Gauss-Legendre rule on [-1,1].
inline constexpr double kGl16Nodes[16] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
inline constexpr double kGl16Weights[16] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

inline double kernel_shape(KernelShape s, double y) {
  const double r = 1.0 - y * y;
  if (r <= 0.0) return 0.0;
  return s == KernelShape::Bump ? std::exp(-1.0 / r) : r * r;
}

/// Integral of the raw shape over [a, b] (subset of [-1, 1]) by GL16.
inline double shape_integral(KernelShape s, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int k = 0; k < 16; ++k)
    acc += kGl16Weights[k] * kernel_shape(s, mid + half * kGl16Nodes[k]);
  return acc * half;
}

/// Integral of the raw shape over [-1,1], composite GL16.
inline double shape_mass(KernelShape s, int panels = 64) {
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = -1.0 + 2.0 * double(p) / panels;
    const double b = -1.0 + 2.0 * double(p + 1) / panels;
    acc += shape_integral(s, a, b);
  }
  return acc;
}

}  // namespace detail

/// Compactly supported symmetric kernel K with unit mass; K_eps scales as
/// eps^{-1} K(x/eps), which preserves the mass for every eps.
class MollifierKernel {
 public:
  KernelShape shape;
  double epsilon;
  double normalization;  // 1 / integral of the raw shape

  MollifierKernel(KernelShape s, double eps) : shape(s), epsilon(eps) {
    if (!(epsilon > 0.0)) throw ValidationError("kernel.epsilon", "must be > 0");
    normalization = 1.0 / detail::shape_mass(shape);
  }

  /// Pointwise K_eps(r).
  double operator()(double r) const {
    return normalization / epsilon * detail::kernel_shape(shape, r / epsilon);
  }

  double peak() const { return (*this)(0.0); }
};

/// Kernel mass per grid cell: w_k = integral of K_eps over
/// [(k-1/2)dx, (k+1/2)dx], normalized so the weights sum to one exactly.
/// Pointwise sampling would break mass conservation when eps is a small
/// multiple of dx.
struct CellStencil {
  int halfwidth = 0;
  std::vector<double> weights;  // size 2*halfwidth + 1
};

inline CellStencil make_cell_stencil(const MollifierKernel& k, double dx) {
  CellStencil st;
  st.halfwidth = int(std::floor(k.epsilon / dx + 0.5)) + 1;
  st.weights.assign(2 * st.halfwidth + 1, 0.0);
  double total = 0.0;
  for (int off = -st.halfwidth; off <= st.halfwidth; ++off) {
    const double a = std::max(-1.0, (off * dx - 0.5 * dx) / k.epsilon);
    const double b = std::min(1.0, (off * dx + 0.5 * dx) / k.epsilon);
    const double m = (a < b) ? detail::shape_integral(k.shape, a, b) : 0.0;
    st.weights[off + st.halfwidth] = m;
    total += m;
  }
  for (double& w : st.weights) w /= total;
  return st;
}

/// Banded convolution with zero extension outside the grid. Exactly
/// mass-preserving in the interior since the cell weights sum to one.
inline void apply_cell_stencil(const CellStencil& st, std::span<const double> in,
                               std::span<double> out) {
  const int n = int(in.size());
  const int m = st.halfwidth;
  for (int i = 0; i < n; ++i) {
    const int klo = std::max(-m, i - (n - 1));
    const int khi = std::min(m, i);
    double acc = 0.0;
    for (int k = klo; k <= khi; ++k) acc += st.weights[k + m] * in[i - k];
    out[i] = acc;
  }
}

/// (K_eps * mu)(x) for the empirical measure of `positions`; includes every
/// particle (self-term and all). Summation runs in ascending-position order
/// so the result is independent of storage order.
inline double convolve_empirical(const MollifierKernel& k, std::span<const double> positions,
                                 double x) {
  if (positions.empty()) throw EmptyInput("convolve_empirical: no particles");
  std::vector<double> sorted(positions.begin(), positions.end());
  std::sort(sorted.begin(), sorted.end());
  auto lo = std::lower_bound(sorted.begin(), sorted.end(), x - k.epsilon);
  auto hi = std::upper_bound(sorted.begin(), sorted.end(), x + k.epsilon);
  double acc = 0.0;
  for (auto it = lo; it != hi; ++it) acc += k(x - *it);
  return acc / double(positions.size());
}

/// Same as convolve_empirical but assumes positions sorted ascending.
inline double convolve_sorted(const MollifierKernel& k, std::span<const double> sorted, double x) {
  auto lo = std::lower_bound(sorted.begin(), sorted.end(), x - k.epsilon);
  auto hi = std::upper_bound(sorted.begin(), sorted.end(), x + k.epsilon);
  double acc = 0.0;
  for (auto it = lo; it != hi; ++it) acc += k(x - *it);
  return acc / double(sorted.size());
}

/// Grid convolution K_eps * u with per-cell-exact kernel masses.
inline DensityField convolve_density(const MollifierKernel& k, const DensityField& u) {
  if (k.epsilon < 2.0 * u.grid.dx)
    throw UnderResolvedKernel("convolve_density: epsilon < 2*dx (refine the grid first)");
  const CellStencil st = make_cell_stencil(k, u.grid.dx);
  DensityField out{u.grid, std::vector<double>(u.values.size()), u.time_stamp};
  apply_cell_stencil(st, u.values, out.values);
  return out;
}

}  // namespace mfchaos
