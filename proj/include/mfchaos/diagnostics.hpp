#pragma once

#include <cmath>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "mfchaos/driver.hpp"
#include "mfchaos/errors.hpp"
#include "mfchaos/fp_solver.hpp"
#include "mfchaos/grid.hpp"

namespace mfchaos {

/// The two highest-order terms of the H1 energy budget, evaluated on a
/// snapshot: the dissipation T1 and the bound on the critical part of T3.
/// coercivity_margin > 0 is the checkable content of the stability
/// condition gamma > 0 (lower-order terms carry unspecified constants and
/// are not reconstructed).
struct EnergyBudget {
  double t = 0.0;
  double i_energy = 0.0;          // I(t) = 1/2 ||du/dx||_L2^2
  double t1 = 0.0;                // -1/2 int D (d2u)^2 dx  (<= 0)
  double t3_crit_bound = 0.0;     // (C0*M/c_h) ||d2u||_L2^2
  double coercivity_margin = 0.0; // -t1 - t3_crit_bound
  double d2_l2 = 0.0;             // ||d2u||_L2
};

inline EnergyBudget energy_budget(const DensityField& u, const DensityField& d_field,
                                  const DriverBounds& bounds, double m) {
  if (!(u.grid == d_field.grid)) throw ValidationError("grid", "u and D must share a grid");
  EnergyBudget b;
  b.t = u.time_stamp;

  const std::vector<double> du = gradient(u.grid, u.values);
  std::vector<double> tmp(du.size());
  for (std::size_t i = 0; i < du.size(); ++i) tmp[i] = du[i] * du[i];
  b.i_energy = 0.5 * trapz(u.grid, tmp);

  const std::vector<double> d2 = second_derivative(u.grid, u.values);
  for (std::size_t i = 0; i < d2.size(); ++i) tmp[i] = d2[i] * d2[i];
  const double d2_sq = trapz(u.grid, tmp);
  b.d2_l2 = std::sqrt(std::max(0.0, d2_sq));
  for (std::size_t i = 0; i < d2.size(); ++i) tmp[i] = d_field.values[i] * d2[i] * d2[i];
  b.t1 = -0.5 * trapz(u.grid, tmp);
  b.t3_crit_bound = bounds.C0 * m / bounds.c_h * d2_sq;
  b.coercivity_margin = -b.t1 - b.t3_crit_bound;
  return b;
}

struct GronwallFit {
  double c_growth = 0.0;
  double fit_residual = 0.0;  // RMS misfit in log scale
};

/// Least-squares fit of log e(t) = log e(0) + 2*c*t with the intercept
/// pinned at the first sample; robust to discretization noise unlike an
/// endpoint ratio.
inline GronwallFit gronwall_fit(std::span<const std::pair<double, double>> series) {
  if (series.size() < 8) throw ValidationError("series", "needs at least 8 samples");
  for (const auto& [t, e] : series)
    if (!(e > 0.0)) throw NonPositiveEnergy("gronwall_fit: energies must be positive");

  const double t0 = series.front().first;
  const double log_e0 = std::log(series.front().second);
  double num = 0.0, den = 0.0;
  for (const auto& [t, e] : series) {
    const double tau = t - t0;
    num += tau * (std::log(e) - log_e0);
    den += tau * tau;
  }
  GronwallFit f;
  f.c_growth = (den > 0.0) ? num / (2.0 * den) : 0.0;
  double rss = 0.0;
  for (const auto& [t, e] : series) {
    const double r = std::log(e) - log_e0 - 2.0 * f.c_growth * (t - t0);
    rss += r * r;
  }
  f.fit_residual = std::sqrt(rss / double(series.size()));
  return f;
}

/// t* = ((C_D' * c_a) / c0^2)^2 with C_D' = 2*C0/c_h, the time past which
/// the sup-norm decay restores coercivity of the H1 estimate.
inline double smoothing_threshold(const DriverBounds& bounds, double c_a) {
  if (!(c_a > 0.0)) throw ValidationError("c_a", "must be > 0");
  const double cd_prime = 2.0 * bounds.C0 / bounds.c_h;
  const double r = cd_prime * c_a / (bounds.c0 * bounds.c0);
  return r * r;
}

/// c_a_hat = max over snapshots in (t_lo, t_hi] of sqrt(t) * linf(u(t)).
inline double estimate_aronson(const FpTrajectory& traj, double t_lo, double t_hi) {
  if (!(t_lo > 0.0)) throw ValidationError("t_window", "t_lo must be > 0");
  double c = 0.0;
  bool seen = false;
  for (const DensityField& u : traj.snapshots) {
    if (u.time_stamp < t_lo || u.time_stamp > t_hi) continue;
    double linf = 0.0;
    for (double v : u.values) linf = std::max(linf, v);
    c = std::max(c, std::sqrt(u.time_stamp) * linf);
    seen = true;
  }
  if (!seen) throw WindowEmpty("estimate_aronson: no snapshots in the window");
  return c;
}

/// Energy-budget CSV: t,i_energy,t1,t3_crit_bound,coercivity_margin,d2_l2.
inline void write_energy_csv(std::ostream& os, std::span<const EnergyBudget> rows) {
  os << "t,i_energy,t1,t3_crit_bound,coercivity_margin,d2_l2\n";
  for (const EnergyBudget& b : rows) {
    const double cols[] = {b.t, b.i_energy, b.t1, b.t3_crit_bound, b.coercivity_margin, b.d2_l2};
    for (int i = 0; i < 6; ++i) {
      if (i) os << ',';
      detail::print_csv_double(os, cols[i]);
    }
    os << '\n';
  }
}

}  // namespace mfchaos
