#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "mfchaos/errors.hpp"

namespace mfchaos {

/// h(z) = a*z - b, strictly increasing with slope a.
struct LinearDriver {
  double a;
  double b;
};

/// h(z) = a*z + amplitude*sin(frequency*z) - b; monotone when
/// a - |amplitude*frequency| > 0.
struct MonotonePerturbedDriver {
  double a;
  double b;
  double amplitude;
  double frequency;
};

/// User-supplied driver. `h` and `dz_h` take (t, x, z). An explicit
/// `inverse(t, x, v)` may be supplied to bypass root finding; the
/// residual contract then rests with the supplier (used for constant-
/// volatility control runs, which no strictly increasing h can express).
struct CustomDriver {
  std::function<double(double, double, double)> h;
  std::function<double(double, double, double)> dz_h;
  std::function<double(double, double, double)> inverse;
};

/// Probe lattice over (t, x, v) used for construction spot-checks and
/// bound extraction on custom drivers.
struct ProbeLattice {
  std::vector<double> times;
  std::vector<double> positions;
  std::vector<double> densities;

  static std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    if (n == 1) {
      v[0] = lo;
      return v;
    }
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * double(i) / double(n - 1);
    return v;
  }

  static ProbeLattice box(double t0, double t1, int nt, double x0, double x1, int nx, double v0,
                          double v1, int nv) {
    return ProbeLattice{linspace(t0, t1, nt), linspace(x0, x1, nx), linspace(v0, v1, nv)};
  }
};

class DriverSpec {
 public:
  std::variant<LinearDriver, MonotonePerturbedDriver, CustomDriver> kind;
  double root_tolerance = 1e-12;
  double bracket_halfwidth = 1.0;

  DriverSpec(LinearDriver d, double tol = 1e-12, double halfwidth = 1.0)
      : kind(d), root_tolerance(tol), bracket_halfwidth(halfwidth) {
    if (!(d.a > 0.0)) throw ValidationError("driver.a", "must be > 0");
    if (!(d.b > 0.0)) throw ValidationError("driver.b", "must be > 0");
    validate_common();
  }

  DriverSpec(MonotonePerturbedDriver d, double tol = 1e-12, double halfwidth = 1.0)
      : kind(d), root_tolerance(tol), bracket_halfwidth(halfwidth) {
    if (!(d.a > 0.0)) throw ValidationError("driver.a", "must be > 0");
    if (!(d.b > 0.0)) throw ValidationError("driver.b", "must be > 0");
    if (!(d.a - std::abs(d.amplitude * d.frequency) > 0.0))
      throw ValidationError("driver.amplitude",
                            "a - |amplitude*frequency| must be > 0 (monotone slope bound)");
    validate_common();
  }

  /// Custom drivers are spot-checked for a positive slope on the probe
  /// lattice; no numerical differentiation of the callables anywhere.
  DriverSpec(CustomDriver d, double tol = 1e-12, double halfwidth = 1.0,
             const ProbeLattice& probe = default_probe())
      : kind(std::move(d)), root_tolerance(tol), bracket_halfwidth(halfwidth) {
    const auto& c = std::get<CustomDriver>(kind);
    if (!c.h && !c.inverse)
      throw ValidationError("driver.h", "custom driver must supply h or an explicit inverse");
    if (c.h && !c.dz_h)
      throw ValidationError("driver.dz_h", "custom driver with h must supply dz_h");
    if (c.h) {
      for (double t : probe.times)
        for (double x : probe.positions)
          for (double z : probe.densities)
            if (!(c.dz_h(t, x, z) > 0.0))
              throw ValidationError("driver.dz_h",
                                    "must be > 0 on the probe lattice (strict monotonicity)");
    }
    validate_common();
  }

  static ProbeLattice default_probe() { return ProbeLattice::box(0, 1, 3, -5, 5, 5, -8, 8, 33); }

 private:
  void validate_common() const {
    if (!(root_tolerance > 0.0)) throw ValidationError("driver.root_tolerance", "must be > 0");
    if (!(bracket_halfwidth > 0.0))
      throw ValidationError("driver.bracket_halfwidth", "must be > 0");
  }
};

inline double h_value(const DriverSpec& s, double t, double x, double z) {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, LinearDriver>) {
          return d.a * z - d.b;
        } else if constexpr (std::is_same_v<T, MonotonePerturbedDriver>) {
          return d.a * z + d.amplitude * std::sin(d.frequency * z) - d.b;
        } else {
          if (!d.h) throw ValidationError("driver.h", "explicit-inverse driver has no h");
          return d.h(t, x, z);
        }
      },
      s.kind);
}

inline double h_slope(const DriverSpec& s, double t, double x, double z) {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, LinearDriver>) {
          return d.a;
        } else if constexpr (std::is_same_v<T, MonotonePerturbedDriver>) {
          return d.a + d.amplitude * d.frequency * std::cos(d.frequency * z);
        } else {
          if (!d.dz_h) throw ValidationError("driver.dz_h", "explicit-inverse driver has no dz_h");
          return d.dz_h(t, x, z);
        }
      },
      s.kind);
}

namespace detail {

/// Safeguarded Newton inside a bisection bracket. f is increasing;
/// the bracket satisfies f(lo) <= 0 <= f(hi).
template <class F, class DF>
double newton_bisect(const F& f, const DF& df, double lo, double hi, double tol) {
  double z = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fz = f(z);
    if (std::abs(fz) <= tol) return z;
    if (fz < 0.0)
      lo = z;
    else
      hi = z;
    const double d = df(z);
    double zn = (d > 0.0) ? z - fz / d : lo - 1.0;
    if (!(zn > lo && zn < hi)) zn = 0.5 * (lo + hi);
    z = zn;
  }
  throw NonConvergence("invert_driver: iteration budget exhausted");
}

/// Geometric bracket expansion around `center` (doubling halfwidth, max
/// 64 expansions). Failure signals a driver violating monotone coercivity.
template <class F>
std::pair<double, double> expand_bracket(const F& f, double center, double halfwidth) {
  double h = halfwidth;
  for (int k = 0; k < 64; ++k) {
    const double lo = center - h, hi = center + h;
    if (f(lo) <= 0.0 && f(hi) >= 0.0) return {lo, hi};
    h *= 2.0;
  }
  throw BracketFailure("invert_driver: no sign change after 64 bracket expansions");
}

}  // namespace detail

/// Solves h(t, x, nu) = v for the volatility nu. v is a mollified density
/// value: tiny negatives from convolution round-off (>= -1e-10) clamp to 0.
inline double invert_driver(const DriverSpec& s, double t, double x, double v) {
  if (v < 0.0) {
    if (v < -1e-10) throw ValidationError("v", "must be >= 0 (beyond round-off clamp band)");
    v = 0.0;
  }
  if (const auto* lin = std::get_if<LinearDriver>(&s.kind)) return (v + lin->b) / lin->a;
  if (const auto* c = std::get_if<CustomDriver>(&s.kind); c && c->inverse)
    return c->inverse(t, x, v);

  const auto f = [&](double z) { return h_value(s, t, x, z) - v; };
  const auto df = [&](double z) { return h_slope(s, t, x, z); };
  double center = 0.0;
  if (const auto* mp = std::get_if<MonotonePerturbedDriver>(&s.kind))
    center = (v + mp->b) / mp->a;
  const auto [lo, hi] = detail::expand_bracket(f, center, s.bracket_halfwidth);
  return detail::newton_bisect(f, df, lo, hi, s.root_tolerance);
}

/// Structural constants of the driver: slope floor c_h, basal volatility
/// floor c0, and the range-aware ceiling C0 = sup h^{-1} over v in [0, m_inf].
/// Basal-convention bounds are obtained with m_inf = 0.
struct DriverBounds {
  double c_h;
  double c0;
  double C0;
};

struct StabilityReport {
  double m_inf = 0.0;
  double gamma = 0.0;  // c0^2/2 - C0*m_inf/c_h
  bool satisfied = false;
  double margin = 0.0;  // gamma / (c0^2/2)
};

inline DriverBounds extract_bounds(const DriverSpec& s, double m_inf,
                                   const ProbeLattice& probe) {
  if (m_inf < 0.0) throw ValidationError("m_inf", "must be >= 0");
  DriverBounds b{0.0, 0.0, 0.0};
  if (const auto* lin = std::get_if<LinearDriver>(&s.kind)) {
    b.c_h = lin->a;
    b.c0 = lin->b / lin->a;
    b.C0 = (m_inf + lin->b) / lin->a;
  } else if (const auto* mp = std::get_if<MonotonePerturbedDriver>(&s.kind)) {
    b.c_h = mp->a - std::abs(mp->amplitude * mp->frequency);
    b.c0 = invert_driver(s, 0.0, 0.0, 0.0);
    b.C0 = invert_driver(s, 0.0, 0.0, m_inf);  // h^{-1} increasing in v
  } else {
    // Custom: infimum/supremum over the probe lattice. Slope is probed on a
    // z-lattice wide enough to cover the realized volatility range.
    const auto& c = std::get<CustomDriver>(s.kind);
    b.c_h = std::numeric_limits<double>::infinity();
    b.c0 = std::numeric_limits<double>::infinity();
    b.C0 = 0.0;
    const std::vector<double> zs = ProbeLattice::linspace(-(10.0 + m_inf), 10.0 + m_inf, 41);
    for (double t : probe.times)
      for (double x : probe.positions) {
        if (c.h && c.dz_h)
          for (double z : zs) b.c_h = std::min(b.c_h, h_slope(s, t, x, z));
        b.c0 = std::min(b.c0, invert_driver(s, t, x, 0.0));
        b.C0 = std::max(b.C0, invert_driver(s, t, x, m_inf));
      }
  }

  // Cross-check analytic kinds against the provided probes.
  if (!std::holds_alternative<CustomDriver>(s.kind) && !probe.densities.empty()) {
    for (double t : probe.times)
      for (double x : probe.positions)
        for (double z : probe.densities)
          if (h_slope(s, t, x, z) < b.c_h - 1e-12)
            throw DegenerateDriver("extract_bounds: probed slope below analytic c_h");
  }

  if (!(b.c_h > 0.0) || !(b.c0 > 0.0))
    throw DegenerateDriver("extract_bounds: inferred c_h or c_0 is not positive");
  return b;
}

inline DriverBounds extract_bounds(const DriverSpec& s, double m_inf) {
  if (std::holds_alternative<CustomDriver>(s.kind))
    return extract_bounds(s, m_inf,
                          ProbeLattice::box(0, 1, 5, -10, 10, 9, 0, std::max(m_inf, 1e-30), 17));
  return extract_bounds(s, m_inf, ProbeLattice{{0.0}, {0.0}, {}});
}

/// gamma = c0^2/2 - C0*m_inf/c_h; satisfied iff gamma > 0 (strict).
inline StabilityReport check_stability(const DriverBounds& b, double m_inf) {
  StabilityReport r;
  r.m_inf = m_inf;
  r.gamma = 0.5 * b.c0 * b.c0 - b.C0 * m_inf / b.c_h;
  r.satisfied = r.gamma > 0.0;
  r.margin = r.gamma / (0.5 * b.c0 * b.c0);
  return r;
}

/// Control driver with volatility identically sigma (explicit inverse);
/// h(z) = z - sigma backs the bounds extraction.
inline DriverSpec constant_volatility_driver(double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("driver.sigma", "must be > 0");
  CustomDriver c;
  c.h = [sigma](double, double, double z) { return z - sigma; };
  c.dz_h = [](double, double, double) { return 1.0; };
  c.inverse = [sigma](double, double, double) { return sigma; };
  return DriverSpec(std::move(c));
}

}  // namespace mfchaos
