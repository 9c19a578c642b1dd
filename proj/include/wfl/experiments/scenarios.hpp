#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wfl/detector.hpp"
#include "wfl/experiments/config.hpp"
#include "wfl/experiments/initial_data.hpp"
#include "wfl/experiments/report.hpp"
#include "wfl/hamiltonian_flow.hpp"
#include "wfl/parallel.hpp"
#include "wfl/propagator.hpp"
#include "wfl/transport_check.hpp"
#include "wfl/version.hpp"

namespace wfl::experiments {

struct RunOptions {
  std::optional<std::string> stamp;   // artifact subdirectory name; default UTC time
  std::optional<std::string> outdir;  // overrides run.outdir
  bool write_artifacts = true;
};

/// A probe location (x, xi) with an optional expected class.
template <std::size_t Dim>
struct ProbePoint {
  std::string label;
  Vec<Dim> x{};
  Vec<Dim> xi{};
  std::optional<Classification> expected;
};

namespace detail {

inline std::string point_label(const std::vector<double>& p, std::size_t dim) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) os << (i == dim ? ';' : ' ');
    format_number(os, p[i]);
  }
  os << ')';
  return os.str();
}

template <std::size_t Dim>
Vec<Dim> to_vec(const std::vector<double>& v, std::size_t offset = 0) {
  Vec<Dim> r{};
  for (std::size_t a = 0; a < Dim; ++a) r[a] = v[offset + a];
  return r;
}

template <std::size_t Dim>
std::vector<ProbePoint<Dim>> probe_points(const ScenarioConfig& c) {
  std::vector<ProbePoint<Dim>> out;
  auto add = [&](const PointList& pts, std::optional<Classification> e) {
    for (const auto& p : pts) out.push_back({point_label(p, Dim), to_vec<Dim>(p), to_vec<Dim>(p, Dim), e});
  };
  add(c.expect_singular, Classification::Singular);
  add(c.expect_regular, Classification::Regular);
  add(c.probe_points, std::nullopt);
  return out;
}

template <std::size_t Dim>
ProbeSpec<Dim> make_probe(const ScenarioConfig& c, const ProbePoint<Dim>& p, const std::string& window) {
  ProbeSpec<Dim> s;
  s.label = p.label;
  s.x0 = p.x;
  s.xi0 = p.xi;
  s.K_radius = c.K_radius;
  s.cone_halfangle = c.cone_halfangle;
  s.a = c.a;
  s.b = c.b;
  s.lambda_ladder = c.lambda;
  s.window = window_by_name<Dim>(window);
  s.positions = c.positions;
  s.directions = c.directions;
  s.radii = c.radii;
  s.thresholds = {c.regular_threshold, c.singular_threshold, c.max_residual};
  return s;
}

template <std::size_t Dim>
PotentialSpec<Dim> make_potential(const ScenarioConfig& c) {
  return builtin_potential<Dim>(c.potential, {c.amplitude, c.potential == "bump" ? c.width : c.nu});
}

inline Evaluator evaluator_from(const std::string& s) {
  if (s == "fast") return Evaluator::Fast;
  if (s == "auto") return Evaluator::Auto;
  return Evaluator::Direct;
}

inline Status expectation_status(Classification got, Classification want) {
  if (got == want) return Status::Pass;
  if (got == Classification::Inconclusive) return Status::Inconclusive;
  return Status::Fail;
}

inline Status agreement_status(Classification a, Classification b) {
  if (a == b) return Status::Pass;
  if (contradicts(a, b)) return Status::Fail;
  return Status::Inconclusive;
}

inline std::string slope_text(const DecayFit& f) {
  std::ostringstream os;
  os << to_string(f.classification) << " (slope " << std::setprecision(4) << f.slope << ")";
  return os.str();
}

inline std::string threshold_text(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "regular <= " << c.regular_threshold << ", singular >= " << c.singular_threshold << ", residual <= "
     << c.max_residual;
  return os.str();
}

/// Fitted slope, or -inf when every rung sits on the floor. A partially
/// clamped fit overestimates the true slope, so separations built on it are
/// conservative.
inline double effective_slope(const DecayFit& f) {
  for (bool c : f.clamped)
    if (!c) return f.slope;
  return -std::numeric_limits<double>::infinity();
}

template <std::size_t Dim>
std::size_t steps_for(const ScenarioConfig& c, const GridSpec<Dim>& grid, double span) {
  return c.steps > 0 ? c.steps : default_steps(grid, c.theta, span);
}

template <std::size_t Dim>
ComplexField<Dim> initial_field(const ScenarioConfig& c, const GridSpec<Dim>& grid, const PotentialSpec<Dim>& pot,
                                 const std::string& kind, RunReport& rep) {
  auto u0 = make_datum<Dim>(kind, grid, to_vec<Dim>(c.x0), to_vec<Dim>(c.k0), c.initial_width);
  if (c.refocus && c.t > 0.0) {
    EvolutionParams<Dim> p{c.theta, pot, -c.t, steps_for(c, grid, c.t)};
    const auto ev = evolve_with_snapshots(u0, p, 0);
    if (ev.boundary_warning()) rep.warnings.push_back("refocused datum reaches the box boundary");
    u0 = ev.final;
  }
  return u0;
}

template <std::size_t Dim>
ComplexField<Dim> evolve_to_t(const ScenarioConfig& c, const ComplexField<Dim>& u0, const PotentialSpec<Dim>& pot,
                              RunReport& rep) {
  if (c.t == 0.0) return u0;
  EvolutionParams<Dim> p{c.theta, pot, c.t, steps_for(c, u0.grid, c.t)};
  const auto ev = evolve_with_snapshots(u0, p, std::max<std::size_t>(1, p.n_steps / 10));
  if (ev.boundary_warning()) {
    std::ostringstream os;
    os << "boundary shell mass fraction " << ev.max_boundary_mass << " exceeds " << kBoundaryMassWarning
       << "; periodic wrap-around may contaminate probes";
    rep.warnings.push_back(os.str());
  }
  return ev.final;
}

template <std::size_t Dim>
void separation_verdicts(const ScenarioConfig& c, const std::vector<ProbePoint<Dim>>& probes,
                         const std::vector<std::vector<DecayFit>>& fits_by_window, RunReport& rep) {
  for (std::size_t w = 0; w < c.windows.size(); ++w) {
    double min_sing = std::numeric_limits<double>::infinity();
    double max_reg = -std::numeric_limits<double>::infinity();
    bool any_s = false, any_r = false;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      if (probes[i].expected == Classification::Singular) {
        min_sing = std::min(min_sing, fits_by_window[w][i].slope);
        any_s = true;
      } else if (probes[i].expected == Classification::Regular) {
        max_reg = std::max(max_reg, effective_slope(fits_by_window[w][i]));
        any_r = true;
      }
    }
    if (!any_s || !any_r) continue;
    const double gap = min_sing - max_reg;
    std::ostringstream m, th;
    m << gap;
    th << "min singular slope - max regular slope >= " << c.min_separation;
    rep.verdicts.push_back({"slope_separation[" + c.windows[w] + "]", "expected groups", "", m.str(), th.str(),
                            gap >= c.min_separation ? Status::Pass : Status::Fail});
  }
}

template <std::size_t Dim>
void window_robustness(const ScenarioConfig& c, const std::vector<ProbePoint<Dim>>& probes,
                       const std::vector<std::vector<DecayFit>>& fits_by_window, const std::string& prefix,
                       RunReport& rep) {
  if (c.windows.size() < 2) return;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    bool clash = false;
    std::string measured;
    for (std::size_t w = 0; w < c.windows.size(); ++w) {
      if (w) measured += " / ";
      measured += c.windows[w] + " " + to_string(fits_by_window[w][i].classification);
      for (std::size_t v = 0; v < w; ++v)
        clash = clash || contradicts(fits_by_window[w][i].classification, fits_by_window[v][i].classification);
    }
    rep.verdicts.push_back({"window_robustness", prefix + probes[i].label, "", measured,
                            "no Regular/Singular disagreement across windows", clash ? Status::Fail : Status::Pass});
  }
}

// theta_eq1_transport, theta_lt1_invariance: static probes on u(t).
template <std::size_t Dim>
void run_time_propagation(const ScenarioConfig& c, RunReport& rep) {
  const auto grid = make_grid<Dim>(c.halfwidth, c.points);
  const auto pot = make_potential<Dim>(c);
  const auto u0 = initial_field<Dim>(c, grid, pot, c.initial, rep);
  const auto ut = evolve_to_t<Dim>(c, u0, pot, rep);
  const auto probes = probe_points<Dim>(c);
  std::vector<std::vector<DecayFit>> fits(c.windows.size());
  for (std::size_t w = 0; w < c.windows.size(); ++w) {
    for (const auto& p : probes) {
      const auto spec = make_probe<Dim>(c, p, c.windows[w]);
      auto fit = probe_static(ut, spec, evaluator_from(c.evaluator));
      if (p.expected)
        rep.verdicts.push_back({"classification[" + c.windows[w] + "]", p.label, to_string(*p.expected),
                                slope_text(fit), threshold_text(c), expectation_status(fit.classification, *p.expected)});
      if (!c.flow_mode.empty()) {
        const auto mode = flow_mode_from_string(c.flow_mode);
        auto flowed = probe_flowed(u0, c.theta, pot, c.t, spec, mode);
        rep.verdicts.push_back({"flowed_agreement[" + c.windows[w] + "]", p.label, slope_text(fit), slope_text(flowed),
                                "flowed " + c.flow_mode + " class equals static class on u(t)",
                                agreement_status(flowed.classification, fit.classification)});
        rep.fits.push_back({p.label, "", "flowed_" + c.flow_mode, std::move(flowed)});
      }
      fits[w].push_back(fit);
      rep.fits.push_back({p.label, "", "static", std::move(fit)});
    }
  }
  separation_verdicts<Dim>(c, probes, fits, rep);
  window_robustness<Dim>(c, probes, fits, "", rep);
}

// theta_mid_potential: flowed (full) on u0 against static on u(t).
template <std::size_t Dim>
void run_mid_potential(const ScenarioConfig& c, RunReport& rep) {
  const auto grid = make_grid<Dim>(c.halfwidth, c.points);
  const auto pot = make_potential<Dim>(c);
  const auto u0 = initial_field<Dim>(c, grid, pot, c.initial, rep);
  const auto ut = evolve_to_t<Dim>(c, u0, pot, rep);
  const auto probes = probe_points<Dim>(c);
  const auto mode = c.flow_mode.empty() ? FlowMode::Full : flow_mode_from_string(c.flow_mode);
  std::vector<std::vector<DecayFit>> fits(c.windows.size());
  for (std::size_t w = 0; w < c.windows.size(); ++w) {
    for (const auto& p : probes) {
      const auto spec = make_probe<Dim>(c, p, c.windows[w]);
      auto stat = probe_static(ut, spec, evaluator_from(c.evaluator));
      auto flowed = probe_flowed(u0, c.theta, pot, c.t, spec, mode);
      rep.verdicts.push_back({"flowed_vs_static[" + c.windows[w] + "]", p.label, slope_text(stat), slope_text(flowed),
                              "flowed " + to_string(mode) + " class on u0 equals static class on u(t)",
                              agreement_status(flowed.classification, stat.classification)});
      if (p.expected)
        rep.verdicts.push_back({"classification[" + c.windows[w] + "]", p.label, to_string(*p.expected),
                                slope_text(stat), threshold_text(c), expectation_status(stat.classification, *p.expected)});
      fits[w].push_back(stat);
      rep.fits.push_back({p.label, "", "static", std::move(stat)});
      rep.fits.push_back({p.label, "", "flowed_" + to_string(mode), std::move(flowed)});
    }
  }
  window_robustness<Dim>(c, probes, fits, "", rep);
}

// free_flow_equivalence: full against free flowed slopes on u0.
template <std::size_t Dim>
void run_free_flow(const ScenarioConfig& c, RunReport& rep) {
  const auto grid = make_grid<Dim>(c.halfwidth, c.points);
  const auto pot = make_potential<Dim>(c);
  const auto u0 = initial_field<Dim>(c, grid, pot, c.initial, rep);
  for (const auto& w : c.windows) {
    for (const auto& p : probe_points<Dim>(c)) {
      const auto spec = make_probe<Dim>(c, p, w);
      auto full = probe_flowed(u0, c.theta, pot, c.t, spec, FlowMode::Full);
      auto free = probe_flowed(u0, c.theta, pot, c.t, spec, FlowMode::Free);
      const double gap = std::abs(full.slope - free.slope);
      std::ostringstream m, th;
      m << "|" << full.slope << " - " << free.slope << "| = " << gap;
      th << "slope gap < " << c.max_slope_gap;
      rep.verdicts.push_back({"full_vs_free_slope[" + w + "]", p.label, "", m.str(), th.str(),
                              gap < c.max_slope_gap ? Status::Pass : Status::Fail});
      if (p.expected)
        rep.verdicts.push_back({"classification[" + w + "]", p.label, to_string(*p.expected), slope_text(full),
                                threshold_text(c), expectation_status(full.classification, *p.expected)});
      rep.fits.push_back({p.label, "", "flowed_full", std::move(full)});
      rep.fits.push_back({p.label, "", "flowed_free", std::move(free)});
    }
  }
}

template <std::size_t Dim>
void run_lemma(const ScenarioConfig& c, RunReport& rep, const std::filesystem::path* dir) {
  const auto pot = make_potential<Dim>(c);
  std::vector<PhasePoint<Dim>> seeds;
  for (const auto& p : probe_points<Dim>(c)) seeds.push_back({p.x, p.xi});
  const auto lemma = check_lemma_bounds<Dim>(c.theta, pot, c.t, seeds, c.lambda, c.a);
  rep.extra["lemma"] = lemma.to_json();
  std::ostringstream m;
  m << "spreads xi_min " << lemma.xi_min_spread << ", xi_max " << lemma.xi_max_spread << ", x_max "
    << lemma.x_max_spread << ", x_end " << lemma.x_end_spread;
  std::ostringstream th;
  th << "relative spread over the top three rungs <= " << kLemmaStabilityTolerance;
  rep.verdicts.push_back({"lambda_uniform_bounds", "seed set", "", m.str(), th.str(),
                          lemma.stable ? Status::Pass : Status::Fail});
  std::ostringstream l0;
  if (lemma.lambda0) l0 << *lemma.lambda0;
  else l0 << "none";
  rep.verdicts.push_back({"momentum_band", "seed set", "", "lambda0 = " + l0.str(),
                          "0.5/a lambda <= |xi(s)| <= 2 a lambda from some rung on",
                          lemma.lambda0 ? Status::Pass : Status::Fail});
  if (dir) {
    const auto tr = flow_backward<Dim>(c.theta, pot, c.t, seeds.front().x, seeds.front().xi, c.lambda.back());
    std::ofstream out(*dir / "trajectory.csv", std::ios::binary);
    write_trajectory_csv(out, tr, pot);
  }
}

template <std::size_t Dim>
TransportReport transport_at(const ScenarioConfig& c, const PotentialSpec<Dim>& pot, double lambda, double scale) {
  const auto grid = make_grid<Dim>(c.halfwidth, c.points);
  const auto k0 = lambda * to_vec<Dim>(c.k0);
  const auto u0 = make_datum<Dim>(c.initial, grid, to_vec<Dim>(c.x0), k0, c.initial_width);
  const double dt = c.transport_dt * scale;
  const auto snaps = transport_snapshots<Dim>(u0, c.theta, pot, c.t, dt, std::min(c.max_step, dt));
  std::vector<PhasePoint<Dim>> lattice;
  for (const auto& x : c.transport_positions)
    for (const auto& m : c.transport_momenta) lattice.push_back({to_vec<Dim>(x), lambda * to_vec<Dim>(m)});
  const auto w = scale_window(window_by_name<Dim>(c.windows.front()), c.b, lambda);
  const SymbolSplit split{c.theta, c.effective_r_cut()};
  return transport_residual<Dim>(snaps, c.theta, pot, split, w, lattice, c.transport_dx * scale, c.transport_dxi * scale);
}

template <std::size_t Dim>
void run_transport(const ScenarioConfig& c, RunReport& rep) {
  const auto pot = make_potential<Dim>(c);
  std::vector<TransportReport> reports;
  auto& arr = rep.extra["transport"] = nlohmann::json::array();
  for (double lambda : c.transport_lambda) {
    reports.push_back(transport_at<Dim>(c, pot, lambda, 1.0));
    arr.push_back(reports.back().to_json());
    std::ostringstream lab;
    lab << "lambda=" << lambda;
    if (c.initial == "plane_wave") {
      std::ostringstream m, th;
      m << "rho = " << reports.back().rho;
      th << "rho < " << c.max_rho;
      rep.verdicts.push_back({"plane_wave_residual", lab.str(), "", m.str(), th.str(),
                              reports.back().rho < c.max_rho ? Status::Pass : Status::Fail});
    }
    if (c.halving) {
      const auto half = transport_at<Dim>(c, pot, lambda, 0.5);
      auto j = half.to_json();
      j["halved"] = true;
      arr.push_back(j);
      std::ostringstream m;
      m << "rho " << reports.back().rho << " -> " << half.rho;
      rep.verdicts.push_back({"stencil_halving", lab.str(), "", m.str(), "rho decreases when dt, dx, dxi halve",
                              half.rho < reports.back().rho ? Status::Pass : Status::Fail});
    }
  }
  if (c.initial != "plane_wave") {
    for (std::size_t i = 1; i < reports.size(); ++i) {
      std::ostringstream lab, m;
      lab << "lambda " << reports[i - 1].lambda << " -> " << reports[i].lambda;
      m << "rho " << reports[i - 1].rho << " -> " << reports[i].rho;
      rep.verdicts.push_back({"rho_decreases_with_lambda", lab.str(), "", m.str(), "rho(2 lambda) < rho(lambda)",
                              reports[i].rho < reports[i - 1].rho ? Status::Pass : Status::Fail});
    }
  }
}

// static_wf_suite: static probes against the Fourier-cone oracle on canonical data.
template <std::size_t Dim>
void run_static_suite(const ScenarioConfig& c, RunReport& rep) {
  const auto grid = make_grid<Dim>(c.halfwidth, c.points);
  const auto probes = probe_points<Dim>(c);
  const Thresholds th{c.regular_threshold, c.singular_threshold, c.max_residual};
  for (const auto& datum : c.suite_data) {
    const auto f = make_datum<Dim>(datum, grid, to_vec<Dim>(c.x0), to_vec<Dim>(c.k0), c.initial_width);
    std::vector<std::vector<DecayFit>> fits(c.windows.size());
    for (const auto& p : probes) {
      auto cone = fourier_cone_decay<Dim>(f, p.x, p.xi, c.cutoff_width, c.cone_halfangle, c.cone_ladder(), th);
      const auto expected = canonical_expectation<Dim>(datum, to_vec<Dim>(c.x0), c.initial_width, p.x, p.xi,
                                                       c.regular_margin, c.cone_halfangle);
      for (std::size_t w = 0; w < c.windows.size(); ++w) {
        auto stat = probe_static(f, make_probe<Dim>(c, p, c.windows[w]), evaluator_from(c.evaluator));
        rep.verdicts.push_back({"oracle_agreement[" + c.windows[w] + "]", datum + " " + p.label, slope_text(cone),
                                slope_text(stat), "no Regular/Singular disagreement with the Fourier-cone oracle",
                                contradicts(stat.classification, cone.classification) ? Status::Fail : Status::Pass});
        if (expected)
          rep.verdicts.push_back({"classification[" + c.windows[w] + "]", datum + " " + p.label, to_string(*expected),
                                  slope_text(stat), threshold_text(c), expectation_status(stat.classification, *expected)});
        fits[w].push_back(stat);
        rep.fits.push_back({p.label, datum, "static", std::move(stat)});
      }
      if (expected)
        rep.verdicts.push_back({"classification[fourier_cone]", datum + " " + p.label, to_string(*expected),
                                slope_text(cone), threshold_text(c), expectation_status(cone.classification, *expected)});
      rep.fits.push_back({p.label, datum, "fourier_cone", std::move(cone)});
    }
    window_robustness<Dim>(c, probes, fits, datum + " ", rep);
  }
}

template <std::size_t Dim>
void dispatch(const ScenarioConfig& c, RunReport& rep, const std::filesystem::path* dir) {
  if (c.scenario == "theta_eq1_transport" || c.scenario == "theta_lt1_invariance") run_time_propagation<Dim>(c, rep);
  else if (c.scenario == "theta_mid_potential") run_mid_potential<Dim>(c, rep);
  else if (c.scenario == "free_flow_equivalence") run_free_flow<Dim>(c, rep);
  else if (c.scenario == "lemma_bounds") run_lemma<Dim>(c, rep, dir);
  else if (c.scenario == "transport_residual") run_transport<Dim>(c, rep);
  else if (c.scenario == "static_wf_suite") run_static_suite<Dim>(c, rep);
  else throw InvalidArgument("unknown scenario '" + c.scenario + "'");
}

inline std::string utc_stamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

inline std::filesystem::path fresh_dir(const std::filesystem::path& base) {
  if (!std::filesystem::exists(base)) return base;
  for (int i = 1;; ++i) {
    std::filesystem::path p = base;
    p += "-" + std::to_string(i);
    if (!std::filesystem::exists(p)) return p;
  }
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

}  // namespace detail

/// Runs the scenario pipeline, writes artifacts under
/// <outdir>/<scenario>/<stamp>/ and returns the report.
inline RunReport run_scenario(const ScenarioConfig& config, const RunOptions& opts = {}) {
  if (const auto errs = validate(config); !errs.empty()) throw ConfigError(errs);
  const auto start = std::chrono::steady_clock::now();
  const std::size_t saved_override = wfl::detail::thread_override().load();
  if (config.threads > 0) set_thread_count(std::min(config.threads, thread_count()));

  RunReport rep;
  rep.scenario = config.scenario;
  rep.config_hash = config_hash(config);
  rep.version = kVersion;
  rep.timestamp = opts.stamp ? *opts.stamp : detail::utc_stamp();

  std::filesystem::path dir;
  if (opts.write_artifacts) {
    dir = detail::fresh_dir(std::filesystem::path(opts.outdir ? *opts.outdir : config.outdir) / config.scenario /
                            rep.timestamp);
    std::filesystem::create_directories(dir);
    rep.artifact_dir = dir.string();
  }
  try {
    if (config.dim == 1) detail::dispatch<1>(config, rep, opts.write_artifacts ? &dir : nullptr);
    else detail::dispatch<2>(config, rep, opts.write_artifacts ? &dir : nullptr);
  } catch (...) {
    set_thread_count(saved_override);
    throw;
  }
  set_thread_count(saved_override);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (opts.write_artifacts) {
    detail::write_text(dir / "config.toml", serialize(config));
    detail::write_text(dir / "report.json", rep.to_json().dump(2) + "\n");
    detail::write_text(dir / "summary.txt", rep.summary());
    std::ostringstream fits, points;
    write_fits_csv(rep, fits);
    write_points_csv(rep, points);
    detail::write_text(dir / "fits.csv", fits.str());
    detail::write_text(dir / "points.csv", points.str());
    emit_plotdata(rep, dir);
  }
  return rep;
}

}  // namespace wfl::experiments
