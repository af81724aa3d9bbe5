#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <variant>
#include <vector>

#include "mfchaos/driver.hpp"
#include "mfchaos/errors.hpp"
#include "mfchaos/grid.hpp"
#include "mfchaos/mollifier.hpp"
#include "mfchaos/rng.hpp"

namespace mfchaos {

struct GaussianLaw {
  double mean = 0.0;
  double sd = 1.0;
};

/// Bump-kernel-shaped density of the given width, centered and mass one.
struct ScaledBumpLaw {
  double center = 0.0;
  double width = 1.0;
};

/// Inverse-CDF sampling from a grid density.
struct FromDensityLaw {
  DensityField field;
};

using InitialLaw = std::variant<GaussianLaw, ScaledBumpLaw, FromDensityLaw>;

/// N particle positions plus the deterministic stream state. Identical
/// (seed, config) reproduce trajectories bitwise; each particle id owns its
/// own noise substream, so permuting labels permutes trajectories exactly.
struct ParticleEnsemble {
  std::vector<double> positions;
  std::vector<std::uint32_t> ids;
  std::uint64_t rng_seed = 0;
  std::uint64_t step_index = 0;
  double time_stamp = 0.0;

  std::size_t n() const { return positions.size(); }
};

struct PerParticleDirect {};
struct GridInterpolated {
  Grid1D grid;
};
using DensityEval = std::variant<PerParticleDirect, GridInterpolated>;

struct SdeConfig {
  DriverSpec driver;
  MollifierKernel kernel;
  double dt = 0.01;
  double t_end = 1.0;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  DensityEval density_eval = PerParticleDirect{};
};

inline void validate(const SdeConfig& c) {
  if (!(c.dt > 0.0)) throw ValidationError("sde.dt", "must be > 0");
  if (!(c.dt <= c.t_end) && c.t_end > 0.0)
    throw ValidationError("sde.dt", "must be <= sde.t_end");
  if (c.n < 1) throw ValidationError("sde.n", "must be >= 1");
  if (const auto* g = std::get_if<GridInterpolated>(&c.density_eval))
    if (c.kernel.epsilon < 2.0 * g->grid.dx)
      throw UnderResolvedKernel("sde: kernel epsilon < 2*dx of the evaluation grid");
}

inline ParticleEnsemble init_ensemble(std::size_t n, const InitialLaw& law, std::uint64_t seed) {
  if (n < 1) throw ValidationError("sde.n", "must be >= 1");
  ParticleEnsemble e;
  e.rng_seed = seed;
  e.positions.resize(n);
  e.ids.resize(n);
  std::iota(e.ids.begin(), e.ids.end(), 0u);

  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, GaussianLaw>) {
          for (std::size_t i = 0; i < n; ++i)
            e.positions[i] = l.mean + l.sd * init_stream(seed, i).normal(0);
        } else if constexpr (std::is_same_v<T, ScaledBumpLaw>) {
          // Rejection sampling from the bump shape; counters advance per try.
          const double peak = std::exp(-1.0);
          for (std::size_t i = 0; i < n; ++i) {
            const CounterRng rng = init_stream(seed, i);
            for (std::uint64_t j = 0;; ++j) {
              const double x = -1.0 + 2.0 * rng.uniform01(2 * j);
              const double y = rng.uniform01(2 * j + 1) * peak;
              if (y <= detail::kernel_shape(KernelShape::Bump, x)) {
                e.positions[i] = l.center + l.width * x;
                break;
              }
            }
          }
        } else {
          const DensityQuantile q(l.field);
          for (std::size_t i = 0; i < n; ++i)
            e.positions[i] = q(init_stream(seed, i).uniform01(0));
        }
      },
      law);
  return e;
}

namespace detail {

/// Mollified empirical density at each particle, evaluated against the
/// frozen pre-step positions. Sorted-order summation keeps the result
/// independent of particle storage order.
inline std::vector<double> mollified_density(const SdeConfig& c,
                                             const ParticleEnsemble& e) {
  const std::size_t n = e.n();
  std::vector<double> sorted = e.positions;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> v(n);

  if (std::holds_alternative<PerParticleDirect>(c.density_eval)) {
    for (std::size_t i = 0; i < n; ++i) v[i] = convolve_sorted(c.kernel, sorted, e.positions[i]);
    return v;
  }

  const Grid1D& g = std::get<GridInterpolated>(c.density_eval).grid;
  DensityField binned{g, std::vector<double>(g.nx, 0.0), e.time_stamp};
  const double w_unit = 1.0 / (double(n) * g.dx);
  for (double y : sorted) {
    double s = (y - g.x_min) / g.dx;
    s = std::clamp(s, 0.0, double(g.nx - 1));
    const int j = std::min(int(s), g.nx - 2);
    const double f = s - double(j);
    binned.values[j] += (1.0 - f) * w_unit;
    binned.values[j + 1] += f * w_unit;
  }
  const DensityField smooth = convolve_density(c.kernel, binned);
  for (std::size_t i = 0; i < n; ++i) {
    double s = (e.positions[i] - g.x_min) / g.dx;
    s = std::clamp(s, 0.0, double(g.nx - 1));
    const int j = std::min(int(s), g.nx - 2);
    const double f = s - double(j);
    v[i] = (1.0 - f) * smooth.values[j] + f * smooth.values[j + 1];
  }
  return v;
}

inline ParticleEnsemble em_step_dt(const SdeConfig& c, const ParticleEnsemble& e, double dt) {
  const std::vector<double> v = mollified_density(c, e);
  ParticleEnsemble out = e;
  const double sqrt_dt = std::sqrt(dt);
  for (std::size_t i = 0; i < e.n(); ++i) {
    const double nu = invert_driver(c.driver, e.time_stamp, e.positions[i], v[i]);
    const double xi = dynamics_stream(e.rng_seed, e.ids[i]).normal(e.step_index);
    out.positions[i] = e.positions[i] + nu * sqrt_dt * xi;
  }
  out.time_stamp = e.time_stamp + dt;
  out.step_index = e.step_index + 1;
  return out;
}

}  // namespace detail

/// One Euler-Maruyama step: v_i = (K_eps * mu^N)(y_i) over the frozen
/// pre-step positions (self-term included), nu_i = h^{-1}(t, y_i, v_i),
/// y_i <- y_i + nu_i * sqrt(dt) * xi_i.
inline ParticleEnsemble em_step(const SdeConfig& c, const ParticleEnsemble& e) {
  validate(c);
  return detail::em_step_dt(c, e, c.dt);
}

/// Repeated em_step to t_end (exact-landing final partial step); snapshots
/// captured at the nearest step times.
inline std::vector<ParticleEnsemble> simulate(const SdeConfig& c, ParticleEnsemble e,
                                              std::vector<double> snapshot_times) {
  validate(c);
  std::sort(snapshot_times.begin(), snapshot_times.end());

  const double t0 = e.time_stamp;
  const double t_eps = 1e-12 * std::max(1.0, c.t_end);
  std::vector<double> step_times{t0};
  {
    double t = t0;
    while (t < c.t_end - t_eps) {
      t = (c.t_end - t > c.dt * (1.0 + 1e-9)) ? t + c.dt : c.t_end;
      step_times.push_back(t);
    }
  }
  // Nearest realized step per requested time.
  std::vector<std::vector<std::size_t>> capture_at(step_times.size());
  for (std::size_t k = 0; k < snapshot_times.size(); ++k) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < step_times.size(); ++j)
      if (std::abs(step_times[j] - snapshot_times[k]) <
          std::abs(step_times[best] - snapshot_times[k]))
        best = j;
    capture_at[best].push_back(k);
  }

  std::vector<ParticleEnsemble> out(snapshot_times.size());
  bool any = !snapshot_times.empty();
  for (std::size_t k : capture_at[0]) out[k] = e;
  for (std::size_t j = 1; j < step_times.size(); ++j) {
    e = detail::em_step_dt(c, e, step_times[j] - step_times[j - 1]);
    for (std::size_t k : capture_at[j]) out[k] = e;
  }
  if (!any) out.push_back(std::move(e));  // default: terminal state only
  return out;
}

/// Ensemble snapshot CSV: t,particle_id,x.
inline void write_ensemble_csv(std::ostream& os, std::span<const ParticleEnsemble> snapshots) {
  os << "t,particle_id,x\n";
  for (const ParticleEnsemble& e : snapshots) {
    for (std::size_t i = 0; i < e.n(); ++i) {
      detail::print_csv_double(os, e.time_stamp);
      os << ',' << e.ids[i] << ',';
      detail::print_csv_double(os, e.positions[i]);
      os << '\n';
    }
  }
}

}  // namespace mfchaos
