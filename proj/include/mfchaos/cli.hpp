#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "mfchaos/config.hpp"
#include "mfchaos/diagnostics.hpp"
#include "mfchaos/experiments.hpp"
#include "mfchaos/report.hpp"

namespace mfchaos {

namespace cli {

inline DriverSpec build_driver(const RunConfig& c) {
  const std::string& kind = c.str("driver.kind");
  const double tol = c.real("driver.root_tolerance");
  const double hw = c.real("driver.bracket_halfwidth");
  if (kind == "linear")
    return DriverSpec(LinearDriver{c.real("driver.a"), c.real("driver.b")}, tol, hw);
  if (kind == "monotone-perturbed")
    return DriverSpec(MonotonePerturbedDriver{c.real("driver.a"), c.real("driver.b"),
                                              c.real("driver.amplitude"),
                                              c.real("driver.frequency")},
                      tol, hw);
  return constant_volatility_driver(c.real("driver.sigma"));
}

inline MollifierKernel build_kernel(const RunConfig& c) {
  const KernelShape s =
      c.str("kernel.shape") == "quartic" ? KernelShape::Quartic : KernelShape::Bump;
  return MollifierKernel(s, c.real("kernel.epsilon"));
}

inline Grid1D build_grid(const RunConfig& c) {
  return Grid1D(c.real("grid.x_min"), c.real("grid.x_max"), int(c.integer("grid.nx")));
}

inline DensityField build_u0(const RunConfig& c, const Grid1D& g) {
  const std::string& kind = c.str("init.kind");
  if (kind == "gaussian") return gaussian_field(g, c.real("init.mean"), c.real("init.sd"));
  if (kind == "gaussian-peak")
    return gaussian_field_with_peak(g, c.real("init.mean"), c.real("init.peak"));
  if (kind == "plateau") return plateau_field(g, c.real("init.center"), c.real("init.width"));
  // bump: kernel-shaped density of the given width
  DensityField u{g, std::vector<double>(g.nx), 0.0};
  const double cn = c.real("init.center"), w = c.real("init.width");
  for (int i = 0; i < g.nx; ++i)
    u.values[i] = detail::kernel_shape(KernelShape::Bump, (g.node(i) - cn) / w);
  const double mass = trapz(g, u.values);
  if (!(mass > 0.0)) throw ValidationError("init.width", "bump lies outside the grid");
  for (double& v : u.values) v /= mass;
  return u;
}

inline InitialLaw build_law(const RunConfig& c, const Grid1D& g) {
  const std::string& kind = c.str("init.kind");
  if (kind == "gaussian") return GaussianLaw{c.real("init.mean"), c.real("init.sd")};
  if (kind == "gaussian-peak") {
    const double sd = 1.0 / (c.real("init.peak") * std::sqrt(2.0 * std::numbers::pi));
    return GaussianLaw{c.real("init.mean"), sd};
  }
  if (kind == "bump") return ScaledBumpLaw{c.real("init.center"), c.real("init.width")};
  return FromDensityLaw{build_u0(c, g)};
}

inline FpConfig build_fp_config(const RunConfig& c) {
  FpConfig fp{build_grid(c), build_kernel(c), build_driver(c),
              c.real("fp.t_end"),
              c.real("fp.cfl_factor"),
              c.str("fp.scheme") == "heun" ? TimeScheme::Heun : TimeScheme::ExplicitEuler,
              c.real_list("fp.snapshot_times"),
              true};
  if (fp.snapshot_times.empty())
    for (int i = 0; i <= 10; ++i) fp.snapshot_times.push_back(fp.t_end * double(i) / 10.0);
  validate(fp);
  return fp;
}

inline SdeConfig build_sde_config(const RunConfig& c, std::uint64_t seed) {
  DensityEval eval = PerParticleDirect{};
  const std::string& mode = c.str("sde.density_eval");
  const std::size_t n = std::size_t(c.integer("sde.n"));
  if (mode == "grid" || (mode == "auto" && n > 5000)) eval = GridInterpolated{build_grid(c)};
  SdeConfig sde{build_driver(c), build_kernel(c), c.real("sde.dt"), c.real("sde.t_end"),
                n, seed, eval};
  validate(sde);
  return sde;
}

inline void print_verdicts(std::ostream& os, const ExperimentReport& rep) {
  for (const Verdict& v : rep.verdicts) {
    const char* tag = v.status == VerdictStatus::Pass
                          ? "PASS"
                          : (v.status == VerdictStatus::Fail ? "FAIL" : "N/A ");
    char buf[64];
    std::snprintf(buf, sizeof(buf), " measured=%.6g threshold=%.6g", v.measured, v.threshold);
    os << "[" << tag << "] " << v.id << buf << "\n";
  }
}

inline std::string timestamp_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%S", &tm_utc);
  return buf;
}

}  // namespace cli

/// Runs the configured subcommand. Writes the effective-config echo before
/// any numerics, then the result files. Returns 0 when all applicable
/// verdicts pass, 2 on verdict failure. Errors propagate to the caller.
inline int dispatch(const RunConfig& cfg, std::ostream& out = std::cout) {
  namespace fs = std::filesystem;
  const std::string experiment = cfg.str("experiment");
  const fs::path out_dir = cfg.str("out_dir");
  const std::string stamp = cli::timestamp_now();
  const std::string hash = config_hash(cfg.kv);
  const std::string base = experiment + "_" + stamp + "_" + hash;
  const int threads = int(cfg.integer("threads"));

  fs::create_directories(out_dir);
  {
    std::ofstream echo(out_dir / (base + "_config.ini"));
    echo << effective_config(cfg);
  }

  ExperimentReport rep;
  rep.parameters = cfg.kv;
  rep.seeds = cfg.int_list("seeds");

  if (experiment == "check-stability") {
    const DriverSpec spec = cli::build_driver(cfg);
    const double m_inf = cfg.real("m_inf");
    const DriverBounds basal = extract_bounds(spec, 0.0);
    const DriverBounds range = extract_bounds(spec, m_inf);
    const StabilityReport rb = check_stability(basal, m_inf);
    const StabilityReport rr = check_stability(range, m_inf);
    rep.kind = ExperimentKind::StabilitySweep;
    rep.tables.push_back({"stability",
                          {{"convention_range_aware", {0.0, 1.0}},
                           {"c_h", {basal.c_h, range.c_h}},
                           {"c0", {basal.c0, range.c0}},
                           {"C0", {basal.C0, range.C0}},
                           {"gamma", {rb.gamma, rr.gamma}},
                           {"satisfied", {rb.satisfied ? 1.0 : 0.0, rr.satisfied ? 1.0 : 0.0}},
                           {"margin", {rb.margin, rr.margin}}}});
    rep.verdicts.push_back({"stability-satisfied", detail::pass_if(rr.satisfied), rr.gamma, 0.0,
                            "range-aware gamma must be > 0"});
    char line[160];
    std::snprintf(line, sizeof(line),
                  "gamma(basal)=%.12g satisfied=%s | gamma(range-aware)=%.12g satisfied=%s\n",
                  rb.gamma, rb.satisfied ? "true" : "false", rr.gamma,
                  rr.satisfied ? "true" : "false");
    out << line;
  } else if (experiment == "solve-fp") {
    const FpConfig fp = cli::build_fp_config(cfg);
    const DensityField u0 = cli::build_u0(cfg, fp.grid);
    const FpTrajectory traj = fp_solve(fp, u0);
    {
      std::ofstream os(out_dir / (base + "_snapshots.csv"));
      write_density_csv(os, traj.snapshots);
    }
    {
      std::ofstream os(out_dir / (base + "_diagnostics.csv"));
      write_diagnostics_csv(os, traj);
    }
    {
      std::vector<EnergyBudget> budget;
      for (const DensityField& u : traj.snapshots) {
        const DensityField d = diffusion_field(fp.driver, fp.kernel, u, u.time_stamp);
        budget.push_back(energy_budget(u, d, traj.bounds, traj.excess_level));
      }
      std::ofstream os(out_dir / (base + "_energy.csv"));
      write_energy_csv(os, budget);
    }
    rep.kind = ExperimentKind::ConvergeEps;
    rep.tables.push_back({"run_summary",
                          {{"mass_error", {traj.max_mass_error()}},
                           {"clamped_mass", {traj.clamped_mass_total}},
                           {"max_boundary_density", {traj.max_boundary_density}},
                           {"sup_t_linf", {traj.sup_linf()}},
                           {"sup_t_h1", {traj.sup_h1()}},
                           {"gamma", {traj.stability.gamma}},
                           {"blow_up", {traj.blew_up ? 1.0 : 0.0}}}});
    rep.verdicts.push_back({"mass-conservation", detail::pass_if(traj.max_mass_error() <= 1e-9),
                            traj.max_mass_error(), 1e-9, "max |mass(t) - mass(0)|"});
    rep.verdicts.push_back({"clamped-mass", detail::pass_if(traj.clamped_mass_total <= 1e-9),
                            traj.clamped_mass_total, 1e-9, "cumulative clamped negative mass"});
    rep.verdicts.push_back({"boundary-density", detail::pass_if(traj.boundary_ok),
                            traj.max_boundary_density, kBoundaryDensityLimit,
                            "max boundary density (domain truncation validity)"});
    rep.verdicts.push_back({"no-blow-up", detail::pass_if(!traj.blew_up),
                            traj.blew_up ? 1.0 : 0.0, 0.0, "blow-up guard"});
    if (!traj.stability.satisfied)
      out << "warning: stability condition not satisfied (gamma = " << traj.stability.gamma
          << "); exploratory regime\n";
  } else if (experiment == "simulate-particles") {
    const Grid1D grid = cli::build_grid(cfg);
    const auto seeds = cfg.int_list("seeds");
    const std::uint64_t seed = seeds.empty() ? 1 : seeds.front();
    const SdeConfig sde = cli::build_sde_config(cfg, seed);
    ParticleEnsemble e = init_ensemble(sde.n, cli::build_law(cfg, grid), seed);
    std::vector<double> times;
    for (int i = 0; i <= 5; ++i) times.push_back(sde.t_end * double(i) / 5.0);
    const std::vector<ParticleEnsemble> snaps = simulate(sde, std::move(e), times);
    std::ofstream os(out_dir / (base + "_ensemble.csv"));
    write_ensemble_csv(os, snaps);
    rep.kind = ExperimentKind::ConvergeN;
    rep.tables.push_back({"run_summary", {{"n", {double(sde.n)}}, {"t_end", {sde.t_end}}}});
  } else if (experiment == "converge-n") {
    ConvergeNInputs in{cli::build_fp_config(cfg),
                       cli::build_u0(cfg, cli::build_grid(cfg)),
                       cli::build_law(cfg, cli::build_grid(cfg)),
                       cfg.real("sde.dt"),
                       {},
                       cfg.int_list("seeds"),
                       threads,
                       4096};
    for (std::uint64_t n : cfg.int_list("sweep.n_list")) in.n_list.push_back(std::size_t(n));
    const auto params = rep.parameters;
    const auto seeds = rep.seeds;
    rep = converge_n(in);
    rep.parameters = params;
    rep.seeds = seeds;
  } else if (experiment == "converge-eps") {
    ConvergeEpsInputs in{cli::build_fp_config(cfg),
                         [cfg](const Grid1D& g) { return cli::build_u0(cfg, g); },
                         cfg.real_list("sweep.eps_list"),
                         cfg.flag("sweep.refine_grid"),
                         4,
                         threads};
    const auto params = rep.parameters;
    rep = converge_eps(in);
    rep.parameters = params;
    rep.seeds = cfg.int_list("seeds");
  } else if (experiment == "uniqueness") {
    const FpConfig fp = cli::build_fp_config(cfg);
    const DensityField u0 = cli::build_u0(cfg, fp.grid);
    const DensityField delta =
        cfg.str("uniqueness.perturbation") == "translate"
            ? translation_perturbation(u0, cfg.real("uniqueness.l2_size"))
            : sinusoidal_neutral_perturbation(fp.grid, cfg.real("uniqueness.l2_size"),
                                              cfg.real("uniqueness.frequency"));
    UniquenessInputs in{fp, u0, delta, threads};
    const auto params = rep.parameters;
    rep = uniqueness_study(in);
    rep.parameters = params;
    rep.seeds = cfg.int_list("seeds");
  } else if (experiment == "stability-sweep") {
    const FpConfig fp = cli::build_fp_config(cfg);
    StabilitySweepInputs in{cfg.real("driver.a"), cfg.real_list("sweep.b_list"),
                            cfg.real("m_inf"), fp, cli::build_u0(cfg, fp.grid), threads};
    const auto params = rep.parameters;
    rep = stability_sweep(in);
    rep.parameters = params;
    rep.seeds = cfg.int_list("seeds");
  } else if (experiment == "smoothing") {
    SmoothingInputs in{cli::build_fp_config(cfg),
                       cfg.real("smoothing.spike_width"),
                       cfg.real("smoothing.window_start"),
                       cfg.flag("smoothing.heat_control"),
                       cfg.real("smoothing.control_sigma"),
                       threads};
    const auto params = rep.parameters;
    rep = smoothing_study(in);
    rep.parameters = params;
    rep.seeds = cfg.int_list("seeds");
  } else {
    throw ValidationError("experiment", "unknown subcommand '" + experiment + "'");
  }

  rep.label = experiment;
  if (experiment == "check-stability" || experiment == "solve-fp" ||
      experiment == "simulate-particles")
    append_verdict_table(rep);
  write_report(rep, out_dir, stamp);
  cli::print_verdicts(out, rep);
  return rep.all_pass() ? 0 : 2;
}

}  // namespace mfchaos
