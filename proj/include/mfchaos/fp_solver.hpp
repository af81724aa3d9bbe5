#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "mfchaos/driver.hpp"
#include "mfchaos/errors.hpp"
#include "mfchaos/grid.hpp"
#include "mfchaos/mollifier.hpp"

namespace mfchaos {

enum class TimeScheme { ExplicitEuler, Heun };

struct FpConfig {
  Grid1D grid;
  MollifierKernel kernel;
  DriverSpec driver;
  double t_end = 1.0;
  double cfl_factor = 0.4;  // dt = cfl_factor * dx^2 / max D, re-evaluated each step
  TimeScheme scheme = TimeScheme::ExplicitEuler;
  std::vector<double> snapshot_times;
  bool clamp_negatives = true;
};

inline void validate(const FpConfig& c) {
  if (!(c.t_end >= 0.0)) throw ValidationError("fp.t_end", "must be >= 0");
  if (!(c.cfl_factor > 0.0 && c.cfl_factor < 1.0))
    throw ValidationError("fp.cfl_factor", "must lie in (0,1)");
  if (c.scheme == TimeScheme::ExplicitEuler && c.cfl_factor > 0.45)
    throw ValidationError("fp.cfl_factor", "must be <= 0.45 for the explicit Euler scheme");
  if (c.kernel.epsilon < 2.0 * c.grid.dx)
    throw UnderResolvedKernel("fp: kernel epsilon < 2*dx");
  for (std::size_t i = 0; i < c.snapshot_times.size(); ++i) {
    const double s = c.snapshot_times[i];
    if (s < 0.0 || s > c.t_end + 1e-12)
      throw ValidationError("fp.snapshot_times", "must lie in [0, t_end]");
    if (i > 0 && s < c.snapshot_times[i - 1])
      throw ValidationError("fp.snapshot_times", "must be sorted ascending");
  }
}

struct StepDiagnostics {
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  double linf = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;
  double excess_mass = 0.0;  // against the initial sup level
  double min_d = 0.0;
  double max_d = 0.0;
  double clamped_mass = 0.0;  // cumulative
};

struct FpTrajectory {
  std::vector<DensityField> snapshots;
  std::vector<StepDiagnostics> diagnostics;
  DriverBounds bounds{1.0, 1.0, 1.0};
  StabilityReport stability;
  double excess_level = 0.0;  // linf(u0), the lemma's level M
  double mass_target = 0.0;   // trapezoidal mass of u0
  double clamped_mass_total = 0.0;
  double max_boundary_density = 0.0;
  bool boundary_ok = true;  // boundary density stayed below 1e-8
  bool blew_up = false;
  double blow_up_time = std::numeric_limits<double>::quiet_NaN();
  Norms initial_norms;

  double sup_linf() const {
    double m = 0.0;
    for (const auto& d : diagnostics) m = std::max(m, d.linf);
    return m;
  }
  double sup_h1() const {
    double m = 0.0;
    for (const auto& d : diagnostics) m = std::max(m, d.h1);
    return m;
  }
  double max_mass_error() const {
    double m = 0.0;
    for (const auto& d : diagnostics) m = std::max(m, std::abs(d.mass - mass_target));
    return m;
  }
};

/// D_i = (h^{-1}(t, x_i, (K_eps*u)(x_i)))^2 at the grid nodes.
inline DensityField diffusion_field(const DriverSpec& driver, const MollifierKernel& kernel,
                                    const DensityField& u, double t) {
  DensityField v = convolve_density(kernel, u);
  DensityField d{u.grid, std::vector<double>(u.grid.nx), t};
  for (int i = 0; i < u.grid.nx; ++i) {
    const double nu = invert_driver(driver, t, u.grid.node(i), v.values[i]);
    d.values[i] = nu * nu;
  }
  return d;
}

namespace detail {

struct FpWorkspace {
  CellStencil stencil;
  std::vector<double> v, d, q, rate, u_star, d2, grad;

  FpWorkspace(const FpConfig& c)
      : stencil(make_cell_stencil(c.kernel, c.grid.dx)),
        v(c.grid.nx),
        d(c.grid.nx),
        q(c.grid.nx),
        rate(c.grid.nx),
        u_star(c.grid.nx),
        d2(c.grid.nx),
        grad(c.grid.nx) {}

  /// Fills v = K_eps*u and d = (h^{-1})^2; returns (min_d, max_d).
  std::pair<double, double> eval_diffusion(const FpConfig& c, std::span<const double> u,
                                           double t) {
    apply_cell_stencil(stencil, u, v);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 0; i < c.grid.nx; ++i) {
      const double nu = invert_driver(c.driver, t, c.grid.node(i), v[i]);
      d[i] = nu * nu;
      lo = std::min(lo, d[i]);
      hi = std::max(hi, d[i]);
    }
    if (!std::isfinite(hi) || !(hi > 0.0))
      throw CflViolation("fp: diffusion field is not finite and positive");
    return {lo, hi};
  }

  /// rate = (1/2) * second difference of q = d*u, zero-flux closure.
  void eval_rate(const FpConfig& c, std::span<const double> u) {
    const int n = c.grid.nx;
    const double inv = 0.5 / (c.grid.dx * c.grid.dx);
    for (int i = 0; i < n; ++i) q[i] = d[i] * u[i];
    rate[0] = inv * (q[1] - q[0]);
    for (int i = 1; i + 1 < n; ++i) rate[i] = inv * (q[i + 1] - 2.0 * q[i] + q[i - 1]);
    rate[n - 1] = inv * (q[n - 2] - q[n - 1]);
  }
};

/// Advances u in place by one step; returns (dt_used, clamped_mass,
/// min_d, max_d). dt_override < 0 lets the CFL rule pick dt.
inline std::tuple<double, double, double, double> advance(const FpConfig& c, FpWorkspace& ws,
                                                          std::vector<double>& u, double t,
                                                          double dt_override, double dt_cap) {
  const int n = c.grid.nx;
  const auto [lo, hi] = ws.eval_diffusion(c, u, t);
  double dt = c.cfl_factor * c.grid.dx * c.grid.dx / hi;
  if (dt_override > 0.0) {
    if (dt_override > c.grid.dx * c.grid.dx / hi + 1e-15)
      throw CflViolation("fp_step: requested dt violates the stability bound");
    dt = dt_override;
  }
  if (dt_cap > 0.0 && dt > dt_cap) dt = dt_cap;

  ws.eval_rate(c, u);
  if (c.scheme == TimeScheme::ExplicitEuler) {
    for (int i = 0; i < n; ++i) u[i] += dt * ws.rate[i];
  } else {
    for (int i = 0; i < n; ++i) ws.u_star[i] = u[i] + dt * ws.rate[i];
    std::vector<double> rate1 = ws.rate;
    ws.eval_diffusion(c, ws.u_star, t + dt);
    ws.eval_rate(c, ws.u_star);
    for (int i = 0; i < n; ++i) u[i] += 0.5 * dt * (rate1[i] + ws.rate[i]);
  }

  double clamped = 0.0;
  if (c.clamp_negatives) {
    for (int i = 0; i < n; ++i)
      if (u[i] < 0.0) {
        clamped -= u[i];
        u[i] = 0.0;
      }
    clamped *= c.grid.dx;
  }
  return {dt, clamped, lo, hi};
}

inline StepDiagnostics make_diag(const FpConfig& c, std::span<const double> u, double t,
                                 double dt, double excess_level, double min_d, double max_d,
                                 double clamped_cum, FpWorkspace& ws) {
  StepDiagnostics d;
  d.t = t;
  d.dt = dt;
  d.min_d = min_d;
  d.max_d = max_d;
  d.clamped_mass = clamped_cum;
  const int n = c.grid.nx;
  double sum = 0.0, sumsq = 0.0, exc = 0.0, linf = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    sum += w * u[i];
    sumsq += w * u[i] * u[i];
    exc += w * std::max(0.0, u[i] - excess_level);
    linf = std::max(linf, u[i]);
  }
  d.mass = sum * c.grid.dx;
  d.l2 = std::sqrt(std::max(0.0, sumsq * c.grid.dx));
  d.excess_mass = exc * c.grid.dx;
  d.linf = linf;
  const double inv2 = 1.0 / (2.0 * c.grid.dx);
  ws.grad[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) * inv2;
  for (int i = 1; i + 1 < n; ++i) ws.grad[i] = (u[i + 1] - u[i - 1]) * inv2;
  ws.grad[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) * inv2;
  double h1semi = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    h1semi += w * ws.grad[i] * ws.grad[i];
  }
  d.h1 = std::sqrt(std::max(0.0, d.l2 * d.l2 + h1semi * c.grid.dx));
  return d;
}

}  // namespace detail

inline constexpr double kBlowUpLevel = 1e6;
inline constexpr double kBoundaryDensityLimit = 1e-8;

/// One explicit step; dt chosen by the CFL rule. Returns the updated field
/// and the dt actually used.
inline std::pair<DensityField, double> fp_step(const FpConfig& c, const DensityField& u,
                                               double t) {
  validate(c);
  detail::FpWorkspace ws(c);
  DensityField out = u;
  auto [dt, clamped, lo, hi] = detail::advance(c, ws, out.values, t, -1.0, -1.0);
  (void)clamped;
  (void)lo;
  (void)hi;
  out.time_stamp = t + dt;
  double linf = 0.0;
  for (double x : out.values) linf = std::max(linf, std::abs(x));
  if (!std::isfinite(linf) || linf > kBlowUpLevel)
    throw BlowUp("fp_step: density exceeded the blow-up guard", t + dt);
  return {std::move(out), dt};
}

/// Integrates to t_end with adaptive explicit stepping, capturing snapshots
/// at the requested times by linear interpolation between bracketing steps.
/// A failed stability check is a recorded warning, not an error; blow-up
/// stops the run and is recorded with its time.
inline FpTrajectory fp_solve(const FpConfig& c, const DensityField& u0) {
  validate(c);
  FpTrajectory traj;
  traj.initial_norms = norms(u0);
  traj.excess_level = traj.initial_norms.linf;
  traj.mass_target = trapz(u0.grid, u0.values);
  traj.bounds = extract_bounds(c.driver, traj.excess_level);
  traj.stability = check_stability(traj.bounds, traj.excess_level);

  detail::FpWorkspace ws(c);
  std::vector<double> u = u0.values;
  std::vector<double> u_prev = u;
  double t = 0.0;

  // Initial diagnostics row (dt = 0) with the initial diffusion range.
  {
    const auto [lo, hi] = ws.eval_diffusion(c, u, 0.0);
    traj.diagnostics.push_back(
        detail::make_diag(c, u, 0.0, 0.0, traj.excess_level, lo, hi, 0.0, ws));
  }

  std::size_t snap_idx = 0;
  const auto& times = c.snapshot_times;
  while (snap_idx < times.size() && times[snap_idx] <= 0.0) {
    DensityField s{c.grid, u, 0.0};
    traj.snapshots.push_back(std::move(s));
    ++snap_idx;
  }

  const double t_eps = 1e-12 * std::max(1.0, c.t_end);
  while (t < c.t_end - t_eps) {
    u_prev = u;
    double dt, clamped, lo, hi;
    try {
      std::tie(dt, clamped, lo, hi) = detail::advance(c, ws, u, t, -1.0, c.t_end - t);
    } catch (const CflViolation&) {
      traj.blew_up = true;
      traj.blow_up_time = t;
      break;
    }
    const double t_new = t + dt;
    traj.clamped_mass_total += clamped;

    const double boundary = std::max(u.front(), u.back());
    traj.max_boundary_density = std::max(traj.max_boundary_density, boundary);

    while (snap_idx < times.size() && times[snap_idx] <= t_new + t_eps) {
      const double s = times[snap_idx];
      const double w = (dt > 0.0) ? std::clamp((s - t) / dt, 0.0, 1.0) : 1.0;
      DensityField snap{c.grid, std::vector<double>(u.size()), s};
      for (std::size_t i = 0; i < u.size(); ++i)
        snap.values[i] = (1.0 - w) * u_prev[i] + w * u[i];
      traj.snapshots.push_back(std::move(snap));
      ++snap_idx;
    }

    traj.diagnostics.push_back(detail::make_diag(c, u, t_new, dt, traj.excess_level, lo, hi,
                                                 traj.clamped_mass_total, ws));
    t = t_new;

    const double linf = traj.diagnostics.back().linf;
    if (!std::isfinite(linf) || linf > kBlowUpLevel) {
      traj.blew_up = true;
      traj.blow_up_time = t;
      break;
    }
  }

  traj.boundary_ok = traj.max_boundary_density < kBoundaryDensityLimit;
  return traj;
}

/// Diagnostics CSV: t,dt,mass,linf,l2,h1,excess_mass,min_D,max_D,clamped_mass.
inline void write_diagnostics_csv(std::ostream& os, const FpTrajectory& traj) {
  os << "t,dt,mass,linf,l2,h1,excess_mass,min_D,max_D,clamped_mass\n";
  for (const auto& d : traj.diagnostics) {
    const double cols[] = {d.t,           d.dt,    d.mass,  d.linf,  d.l2,
                           d.h1,          d.excess_mass,    d.min_d, d.max_d,
                           d.clamped_mass};
    for (int i = 0; i < 10; ++i) {
      if (i) os << ',';
      detail::print_csv_double(os, cols[i]);
    }
    os << '\n';
  }
}

}  // namespace mfchaos
