#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "wfl/detector.hpp"
#include "wfl/experiments/toml_subset.hpp"
#include "wfl/potential.hpp"

namespace wfl::experiments {

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"theta_lt1_invariance", "theta_eq1_transport", "theta_mid_potential",
                                              "free_flow_equivalence", "lemma_bounds",       "transport_residual",
                                              "static_wf_suite"};
  return names;
}

inline const std::vector<std::string>& initial_kinds() {
  static const std::vector<std::string> kinds{"delta", "jump", "gaussian", "modulated_gaussian", "plane_wave"};
  return kinds;
}

/// Every violation found while reading or validating a config.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "invalid config:";
    for (const auto& e : v) s += "\n  - " + e;
    return s;
  }
  std::vector<std::string> violations_;
};

using PointList = std::vector<std::vector<double>>;

/// Validated scenario configuration with every default filled in.
struct ScenarioConfig {
  std::string scenario;
  double theta = 1.0;
  double t = 1.0;

  std::size_t dim = 1;
  double halfwidth = 16.0;
  std::size_t points = 4096;

  std::string potential = "zero";
  double amplitude = 1.0;  // bump amplitude, bracket_power coefficient, constant value
  double width = 2.0;      // bump width
  double nu = 1.0;         // bracket_power exponent

  std::string initial = "delta";
  std::vector<double> x0{0.0};
  std::vector<double> k0{0.0};
  double initial_width = 1.0;
  bool refocus = false;  // u0 <- U(-t) u0, so that u(t) is the constructed datum

  double b = 0.25;  // default min(0.25, (2 - theta)/4)
  double a = 1.5;
  double K_radius = 0.1;
  double cone_halfangle = 0.2;
  std::vector<double> lambda{8, 16, 32, 64, 128};
  std::vector<std::string> windows{"gaussian", "hermite1"};
  std::size_t positions = 5;
  std::size_t directions = 1;  // default 1 in 1D, 5 in 2D
  std::size_t radii = 3;
  double regular_threshold = -4.0;
  double singular_threshold = -1.0;
  double max_residual = 0.5;
  std::string evaluator = "direct";
  PointList probe_points;  // (x..., xi...) without an expected class

  PointList expect_singular;
  PointList expect_regular;
  double min_separation = 3.0;
  double max_slope_gap = 0.3;

  std::vector<std::string> suite_data{"delta", "jump", "gaussian", "modulated_gaussian"};
  double cutoff_width = 1.0;
  std::vector<double> R;  // empty: the probe ladder
  double regular_margin = 0.5;

  std::vector<double> transport_lambda{32, 64};
  double transport_dt = 1e-5;
  double transport_dx = 1e-3;
  double transport_dxi = 1e-3;
  PointList transport_positions{{-1.0}, {-0.5}, {0.0}, {0.5}, {1.0}};
  PointList transport_momenta{{1.0}};  // unit scale; evaluated at lambda * m
  double max_rho = 1e-3;
  bool halving = true;
  double max_step = 1e-3;
  double r_cut = 0.0;  // 0: 0.25 * min lambda / a

  std::string outdir = "runs";
  std::string flow_mode;  // empty: no flowed cross-check
  std::size_t steps = 0;  // 0: default_steps
  std::size_t threads = 0;

  bool operator==(const ScenarioConfig&) const = default;

  bool flowed() const {
    return scenario == "theta_mid_potential" || scenario == "free_flow_equivalence" || !flow_mode.empty();
  }
  std::vector<double> cone_ladder() const { return R.empty() ? lambda : R; }
  double effective_r_cut() const { return r_cut > 0.0 ? r_cut : 0.25 * transport_lambda.front() / a; }
};

namespace detail {

struct Reader {
  const TomlDocument& doc;
  std::vector<std::string>& errors;

  static std::string where(const TomlValue& v) {
    std::ostringstream os;
    os << " (line " << v.line << ", column " << v.column << ")";
    return os.str();
  }
  std::string name(const std::string& sec, const std::string& key) const {
    return sec.empty() ? key : sec + "." + key;
  }

  void number(const std::string& sec, const std::string& key, double& out) {
    if (const auto* v = doc.find(sec, key)) {
      if (v->is_number()) out = std::get<double>(v->data);
      else errors.push_back(name(sec, key) + " must be a number" + where(*v));
    }
  }
  void count(const std::string& sec, const std::string& key, std::size_t& out) {
    if (const auto* v = doc.find(sec, key)) {
      const double d = v->is_number() ? std::get<double>(v->data) : -1.0;
      if (!v->is_number() || d < 0.0 || d != std::floor(d) || d > 1e9) {
        errors.push_back(name(sec, key) + " must be a non-negative integer" + where(*v));
      } else {
        out = static_cast<std::size_t>(d);
      }
    }
  }
  void boolean(const std::string& sec, const std::string& key, bool& out) {
    if (const auto* v = doc.find(sec, key)) {
      if (v->is_bool()) out = std::get<bool>(v->data);
      else errors.push_back(name(sec, key) + " must be true or false" + where(*v));
    }
  }
  void text(const std::string& sec, const std::string& key, std::string& out) {
    if (const auto* v = doc.find(sec, key)) {
      if (v->is_string()) out = std::get<std::string>(v->data);
      else errors.push_back(name(sec, key) + " must be a string" + where(*v));
    }
  }
  void numbers(const std::string& sec, const std::string& key, std::vector<double>& out) {
    if (const auto* v = doc.find(sec, key)) {
      std::vector<double> r;
      bool ok = v->is_array();
      if (ok)
        for (const auto& e : std::get<TomlArray>(v->data)) {
          if (!e.is_number()) ok = false;
          else r.push_back(std::get<double>(e.data));
        }
      if (v->is_number()) {
        r = {std::get<double>(v->data)};
        ok = true;
      }
      if (ok) out = r;
      else errors.push_back(name(sec, key) + " must be an array of numbers" + where(*v));
    }
  }
  void texts(const std::string& sec, const std::string& key, std::vector<std::string>& out) {
    if (const auto* v = doc.find(sec, key)) {
      std::vector<std::string> r;
      bool ok = v->is_array();
      if (ok)
        for (const auto& e : std::get<TomlArray>(v->data)) {
          if (!e.is_string()) ok = false;
          else r.push_back(std::get<std::string>(e.data));
        }
      if (ok) out = r;
      else errors.push_back(name(sec, key) + " must be an array of strings" + where(*v));
    }
  }
  // Accepts [[...], [...]] or, for single-component points, a flat [a, b, ...].
  void points(const std::string& sec, const std::string& key, PointList& out) {
    if (const auto* v = doc.find(sec, key)) {
      PointList r;
      bool ok = v->is_array();
      if (ok)
        for (const auto& e : std::get<TomlArray>(v->data)) {
          if (e.is_number()) {
            r.push_back({std::get<double>(e.data)});
          } else if (e.is_array()) {
            std::vector<double> p;
            for (const auto& c : std::get<TomlArray>(e.data)) {
              if (!c.is_number()) ok = false;
              else p.push_back(std::get<double>(c.data));
            }
            r.push_back(p);
          } else {
            ok = false;
          }
        }
      if (ok) out = r;
      else errors.push_back(name(sec, key) + " must be an array of numeric points" + where(*v));
    }
  }
};

inline const std::vector<std::pair<std::string, std::vector<std::string>>>& known_keys() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> keys{
      {"", {"scenario", "theta", "t"}},
      {"grid", {"dim", "halfwidth", "points"}},
      {"potential", {"kind", "amplitude", "width", "nu"}},
      {"initial", {"kind", "x0", "k0", "width", "refocus"}},
      {"probe",
       {"b", "a", "K_radius", "cone_halfangle", "lambda", "windows", "positions", "directions", "radii",
        "regular_threshold", "singular_threshold", "max_residual", "evaluator", "points"}},
      {"expect", {"singular", "regular", "min_separation", "max_slope_gap"}},
      {"suite", {"data", "cutoff_width", "R", "regular_margin"}},
      {"transport", {"lambda", "dt", "dx", "dxi", "positions", "momenta", "max_rho", "halving", "max_step", "r_cut"}},
      {"run", {"outdir", "flow_mode", "steps", "threads"}},
  };
  return keys;
}

inline bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

template <std::size_t Dim>
void check_potential(const ScenarioConfig& c, std::vector<std::string>& errs) {
  try {
    const auto pot = builtin_potential<Dim>(c.potential, {c.amplitude, c.potential == "bump" ? c.width : c.nu});
    if (c.scenario == "lemma_bounds" || c.scenario == "theta_mid_potential" ||
        (c.flow_mode == "full" && c.theta > 1.0)) {
      if (c.theta > 0.0 && c.theta < 2.0 && !pot.is_zero()) {
        const auto rep = check_growth_assumption(pot, c.theta, kGrowthCheckBox, kGrowthCheckOrders);
        if (!rep.pass) errs.push_back("potential fails the growth condition for theta = " + std::to_string(c.theta));
      }
    }
    if (c.scenario == "free_flow_equivalence" && c.theta > 1.0 && c.theta < 2.0) {
      const auto sr = check_shortrange(pot, c.theta);
      if (!sr.admissible()) {
        errs.push_back("free_flow_equivalence needs a short-range potential: " + sr.reason);
      } else if (!sr.interval->contains(c.b)) {
        std::ostringstream os;
        os << "b = " << c.b << " outside the short-range window (" << sr.interval->lo << ", " << sr.interval->hi << ")";
        errs.push_back(os.str());
      }
    }
  } catch (const std::exception& e) {
    errs.push_back(e.what());
  }
}

}  // namespace detail

/// Cross-field validation; returns every violation.
inline std::vector<std::string> validate(const ScenarioConfig& c) {
  std::vector<std::string> errs;
  auto fmt = [](double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  };
  if (!detail::contains(scenario_names(), c.scenario)) errs.push_back("unknown scenario '" + c.scenario + "'");
  if (!(c.theta > 0.0 && c.theta < 2.0)) errs.push_back("theta must lie in (0, 2)");
  if (!(c.t >= 0.0 && std::isfinite(c.t))) errs.push_back("t must be finite and non-negative");
  if (c.scenario == "theta_eq1_transport" && c.theta != 1.0) errs.push_back("theta_eq1_transport requires theta = 1");
  if (c.scenario == "theta_lt1_invariance" && !(c.theta < 1.0)) errs.push_back("theta_lt1_invariance requires theta < 1");
  if (c.scenario == "theta_mid_potential" && !(c.theta > 1.0 && c.theta < 2.0))
    errs.push_back("theta_mid_potential requires 1 < theta < 2");

  if (c.dim != 1 && c.dim != 2) errs.push_back("grid.dim must be 1 or 2");
  if (!(c.halfwidth > 0.0)) errs.push_back("grid.halfwidth must be positive");
  if (!is_power_of_two(c.points) || c.points < 8) errs.push_back("grid.points must be a power of two >= 8");
  const double kmax = kPi * static_cast<double>(c.points) / (2.0 * c.halfwidth);

  if (!(c.b > 0.0 && c.b < 1.0)) errs.push_back("probe.b must lie in (0, 1)");
  if (c.flowed() && c.theta > 0.0 && c.theta < 2.0 && !(c.b < (2.0 - c.theta) / 2.0))
    errs.push_back("b >= (2-theta)/2 = " + fmt((2.0 - c.theta) / 2.0) + " for a flowed scenario (b = " + fmt(c.b) + ")");
  if (!(c.a >= 1.0)) errs.push_back("probe.a must be >= 1");
  if (!(c.K_radius >= 0.0)) errs.push_back("probe.K_radius must be non-negative");
  if (!(c.cone_halfangle >= 0.0 && c.cone_halfangle < kPi / 2)) errs.push_back("probe.cone_halfangle must lie in [0, pi/2)");
  if (c.lambda.size() < 4) errs.push_back("probe.lambda needs at least 4 rungs");
  for (std::size_t i = 0; i < c.lambda.size(); ++i) {
    if (!(c.lambda[i] >= 1.0)) errs.push_back("probe.lambda rungs must be >= 1");
    if (i > 0 && !(c.lambda[i] > c.lambda[i - 1])) errs.push_back("probe.lambda must be strictly increasing");
  }
  const bool uses_grid_probes = c.scenario != "lemma_bounds" && c.scenario != "transport_residual";
  if (uses_grid_probes && !c.lambda.empty() && c.a >= 1.0 && c.points > 0 && c.halfwidth > 0.0) {
    const double need = c.lambda.back() * c.a;
    if (!(need < 0.8 * kmax))
      errs.push_back("ladder max " + fmt(c.lambda.back()) + " * a " + fmt(c.a) + " = " + fmt(need) +
                     " is not below 0.8*pi*N/(2L) = " + fmt(0.8 * kmax));
  }
  for (const auto& w : c.windows)
    if (w != "gaussian" && w != "hermite1") errs.push_back("unknown window '" + w + "'");
  if (c.windows.empty()) errs.push_back("probe.windows must not be empty");
  if (c.positions == 0 || c.directions == 0 || c.radii == 0) errs.push_back("probe sample counts must be positive");
  if (!(c.regular_threshold < c.singular_threshold)) errs.push_back("regular_threshold must be below singular_threshold");
  if (!(c.max_residual > 0.0)) errs.push_back("probe.max_residual must be positive");
  if (c.evaluator != "direct" && c.evaluator != "fast" && c.evaluator != "auto")
    errs.push_back("probe.evaluator must be direct, fast or auto");

  auto check_points = [&](const PointList& pts, const std::string& what) {
    for (const auto& p : pts) {
      if (p.size() != 2 * c.dim) {
        errs.push_back(what + " entries need " + std::to_string(2 * c.dim) + " numbers (x..., xi...)");
        return;
      }
      double r = 0.0;
      for (std::size_t a = c.dim; a < p.size(); ++a) r += p[a] * p[a];
      if (r == 0.0) errs.push_back(what + " entries need a nonzero momentum");
    }
  };
  check_points(c.probe_points, "probe.points");
  check_points(c.expect_singular, "expect.singular");
  check_points(c.expect_regular, "expect.regular");

  if (!detail::contains(initial_kinds(), c.initial)) errs.push_back("unknown initial kind '" + c.initial + "'");
  if (c.x0.size() != c.dim) errs.push_back("initial.x0 must have dim components");
  if (c.k0.size() != c.dim) errs.push_back("initial.k0 must have dim components");
  if (!(c.initial_width > 0.0)) errs.push_back("initial.width must be positive");

  if (c.potential != "zero" && c.potential != "bump" && c.potential != "bracket_power" && c.potential != "constant")
    errs.push_back("unknown potential kind '" + c.potential + "'");
  else if (c.dim == 1) detail::check_potential<1>(c, errs);
  else if (c.dim == 2) detail::check_potential<2>(c, errs);

  if (!c.flow_mode.empty()) {
    if (c.flow_mode != "full" && c.flow_mode != "free" && c.flow_mode != "frozen") {
      errs.push_back("run.flow_mode must be full, free or frozen");
    } else if (c.flow_mode == "frozen" && !(c.theta < 1.0)) {
      errs.push_back("frozen flow mode requires theta < 1");
    } else if (c.flow_mode == "free" && c.theta > 1.0 && c.scenario != "free_flow_equivalence") {
      std::vector<std::string> sub;
      ScenarioConfig as_free = c;
      as_free.scenario = "free_flow_equivalence";
      detail::check_potential<1>(as_free, sub);
      for (auto& s : sub) errs.push_back("free flow mode: " + s);
    }
  }

  if (c.scenario == "static_wf_suite") {
    if (!c.expect_singular.empty() || !c.expect_regular.empty())
      errs.push_back("static_wf_suite derives expectations from the canonical data; list probes in probe.points");
    for (const auto& d : c.suite_data)
      if (!detail::contains(initial_kinds(), d) || d == "plane_wave") errs.push_back("unknown suite datum '" + d + "'");
    if (c.suite_data.empty()) errs.push_back("suite.data must not be empty");
    if (c.probe_points.empty()) errs.push_back("static_wf_suite needs probe.points");
    if (!(c.cutoff_width > 0.0)) errs.push_back("suite.cutoff_width must be positive");
    const auto Rl = c.cone_ladder();
    for (std::size_t i = 0; i < Rl.size(); ++i) {
      if (!(Rl[i] > 0.0) || (i > 0 && !(Rl[i] > Rl[i - 1]))) errs.push_back("suite.R must be positive and increasing");
    }
    if (!Rl.empty() && !(2.0 * Rl.back() < kmax)) errs.push_back("suite.R max * 2 exceeds the grid band");
  }

  if (c.scenario == "transport_residual") {
    if (c.transport_lambda.empty()) errs.push_back("transport.lambda must not be empty");
    for (std::size_t i = 0; i < c.transport_lambda.size(); ++i)
      if (!(c.transport_lambda[i] >= 1.0) || (i > 0 && !(c.transport_lambda[i] > c.transport_lambda[i - 1])))
        errs.push_back("transport.lambda must be >= 1 and increasing");
    if (!(c.transport_dt > 0.0 && c.transport_dx > 0.0 && c.transport_dxi > 0.0))
      errs.push_back("transport stencil steps must be positive");
    if (!(c.t >= c.transport_dt)) errs.push_back("transport_residual needs t >= transport.dt");
    if (!(c.max_step > 0.0)) errs.push_back("transport.max_step must be positive");
    if (c.transport_positions.empty() || c.transport_momenta.empty())
      errs.push_back("transport.positions and transport.momenta must not be empty");
    for (const auto& p : c.transport_positions)
      if (p.size() != c.dim) errs.push_back("transport.positions entries need dim components");
    double mmax = 0.0;
    for (const auto& m : c.transport_momenta) {
      if (m.size() != c.dim) errs.push_back("transport.momenta entries need dim components");
      double r = 0.0;
      for (double v : m) r = std::max(r, std::abs(v));
      mmax = std::max(mmax, r);
    }
    if (!c.transport_lambda.empty() && !(c.transport_lambda.back() * mmax + c.transport_dxi < 0.8 * kmax))
      errs.push_back("transport lattice momenta exceed 0.8 of the grid band");
    if (c.initial == "plane_wave") {
      const double dk = kPi / c.halfwidth;
      for (double lam : c.transport_lambda)
        for (double k : c.k0) {
          const double q = lam * k / dk;
          if (std::abs(q - std::round(q)) > 1e-9) errs.push_back("plane_wave: lambda * k0 must be a grid frequency");
        }
    }
  } else if (c.initial == "plane_wave") {
    errs.push_back("plane_wave data is only meaningful for transport_residual");
  }

  if (c.scenario == "lemma_bounds") {
    if (c.probe_points.empty() && c.expect_singular.empty() && c.expect_regular.empty())
      errs.push_back("lemma_bounds needs seed phase points in probe.points");
    if (c.lambda.size() < 3) errs.push_back("lemma_bounds needs at least three ladder rungs");
  }
  if (c.scenario == "free_flow_equivalence" || c.scenario == "theta_mid_potential") {
    if (c.probe_points.empty() && c.expect_singular.empty() && c.expect_regular.empty())
      errs.push_back(c.scenario + " needs probes");
  }
  std::sort(errs.begin(), errs.end());
  errs.erase(std::unique(errs.begin(), errs.end()), errs.end());
  return errs;
}

/// Reads and validates config text; throws ParseError or ConfigError.
inline ScenarioConfig parse_config(const std::string& text) {
  const TomlDocument doc = parse_toml(text);
  std::vector<std::string> errs;
  for (const auto& [sec, entries] : doc.sections) {
    const auto& known = detail::known_keys();
    const auto it = std::find_if(known.begin(), known.end(), [&](const auto& k) { return k.first == sec; });
    if (it == known.end()) {
      errs.push_back("unknown section [" + sec + "]");
      continue;
    }
    for (const auto& e : entries)
      if (!detail::contains(it->second, e.key))
        errs.push_back("unknown key '" + (sec.empty() ? e.key : sec + "." + e.key) + "'" + detail::Reader::where(e.value));
  }
  ScenarioConfig c;
  detail::Reader r{doc, errs};
  r.text("", "scenario", c.scenario);
  if (!doc.find("", "scenario")) errs.push_back("missing required key 'scenario'");
  r.number("", "theta", c.theta);
  r.number("", "t", c.t);
  r.count("grid", "dim", c.dim);
  r.number("grid", "halfwidth", c.halfwidth);
  r.count("grid", "points", c.points);
  r.text("potential", "kind", c.potential);
  r.number("potential", "amplitude", c.amplitude);
  r.number("potential", "width", c.width);
  r.number("potential", "nu", c.nu);
  r.text("initial", "kind", c.initial);
  c.x0.assign(c.dim, 0.0);
  c.k0.assign(c.dim, 0.0);
  r.numbers("initial", "x0", c.x0);
  r.numbers("initial", "k0", c.k0);
  r.number("initial", "width", c.initial_width);
  r.boolean("initial", "refocus", c.refocus);
  c.b = std::min(0.25, (2.0 - c.theta) / 4.0);
  r.number("probe", "b", c.b);
  r.number("probe", "a", c.a);
  r.number("probe", "K_radius", c.K_radius);
  r.number("probe", "cone_halfangle", c.cone_halfangle);
  r.numbers("probe", "lambda", c.lambda);
  r.texts("probe", "windows", c.windows);
  r.count("probe", "positions", c.positions);
  c.directions = c.dim == 2 ? 5 : 1;
  r.count("probe", "directions", c.directions);
  r.count("probe", "radii", c.radii);
  r.number("probe", "regular_threshold", c.regular_threshold);
  r.number("probe", "singular_threshold", c.singular_threshold);
  r.number("probe", "max_residual", c.max_residual);
  r.text("probe", "evaluator", c.evaluator);
  r.points("probe", "points", c.probe_points);
  r.points("expect", "singular", c.expect_singular);
  r.points("expect", "regular", c.expect_regular);
  r.number("expect", "min_separation", c.min_separation);
  r.number("expect", "max_slope_gap", c.max_slope_gap);
  r.texts("suite", "data", c.suite_data);
  r.number("suite", "cutoff_width", c.cutoff_width);
  r.numbers("suite", "R", c.R);
  r.number("suite", "regular_margin", c.regular_margin);
  r.numbers("transport", "lambda", c.transport_lambda);
  r.number("transport", "dt", c.transport_dt);
  r.number("transport", "dx", c.transport_dx);
  r.number("transport", "dxi", c.transport_dxi);
  if (c.dim == 2) {
    c.transport_positions = {{-1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
    c.transport_momenta = {{1.0, 0.0}};
  }
  r.points("transport", "positions", c.transport_positions);
  r.points("transport", "momenta", c.transport_momenta);
  r.number("transport", "max_rho", c.max_rho);
  r.boolean("transport", "halving", c.halving);
  r.number("transport", "max_step", c.max_step);
  r.number("transport", "r_cut", c.r_cut);
  r.text("run", "outdir", c.outdir);
  r.text("run", "flow_mode", c.flow_mode);
  r.count("run", "steps", c.steps);
  r.count("run", "threads", c.threads);
  if (errs.empty()) errs = validate(c);
  if (!errs.empty()) throw ConfigError(errs);
  return c;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config file '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

namespace detail {

inline void put(std::ostream& os, const std::string& key, double v) {
  os << key << " = ";
  format_number(os, v);
  os << '\n';
}
inline void put(std::ostream& os, const std::string& key, const std::string& v) {
  os << key << " = ";
  write_toml_value(os, TomlValue{v});
  os << '\n';
}
inline void put_bool(std::ostream& os, const std::string& key, bool v) { os << key << " = " << (v ? "true" : "false") << '\n'; }
inline void put(std::ostream& os, const std::string& key, std::size_t v) { os << key << " = " << v << '\n'; }
inline void put(std::ostream& os, const std::string& key, const std::vector<double>& v) {
  os << key << " = [";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    format_number(os, v[i]);
  }
  os << "]\n";
}
inline void put(std::ostream& os, const std::string& key, const std::vector<std::string>& v) {
  os << key << " = [";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    write_toml_value(os, TomlValue{v[i]});
  }
  os << "]\n";
}
inline void put(std::ostream& os, const std::string& key, const PointList& v) {
  os << key << " = [";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << '[';
    for (std::size_t j = 0; j < v[i].size(); ++j) {
      if (j) os << ", ";
      format_number(os, v[i][j]);
    }
    os << ']';
  }
  os << "]\n";
}

}  // namespace detail

/// Canonical text of a validated config; parse_config(serialize(c)) == c.
inline std::string serialize(const ScenarioConfig& c) {
  using detail::put;
  std::ostringstream os;
  put(os, "scenario", c.scenario);
  put(os, "theta", c.theta);
  put(os, "t", c.t);
  os << "\n[grid]\n";
  put(os, "dim", c.dim);
  put(os, "halfwidth", c.halfwidth);
  put(os, "points", c.points);
  os << "\n[potential]\n";
  put(os, "kind", c.potential);
  put(os, "amplitude", c.amplitude);
  put(os, "width", c.width);
  put(os, "nu", c.nu);
  os << "\n[initial]\n";
  put(os, "kind", c.initial);
  put(os, "x0", c.x0);
  put(os, "k0", c.k0);
  put(os, "width", c.initial_width);
  detail::put_bool(os, "refocus", c.refocus);
  os << "\n[probe]\n";
  put(os, "b", c.b);
  put(os, "a", c.a);
  put(os, "K_radius", c.K_radius);
  put(os, "cone_halfangle", c.cone_halfangle);
  put(os, "lambda", c.lambda);
  put(os, "windows", c.windows);
  put(os, "positions", c.positions);
  put(os, "directions", c.directions);
  put(os, "radii", c.radii);
  put(os, "regular_threshold", c.regular_threshold);
  put(os, "singular_threshold", c.singular_threshold);
  put(os, "max_residual", c.max_residual);
  put(os, "evaluator", c.evaluator);
  put(os, "points", c.probe_points);
  os << "\n[expect]\n";
  put(os, "singular", c.expect_singular);
  put(os, "regular", c.expect_regular);
  put(os, "min_separation", c.min_separation);
  put(os, "max_slope_gap", c.max_slope_gap);
  os << "\n[suite]\n";
  put(os, "data", c.suite_data);
  put(os, "cutoff_width", c.cutoff_width);
  put(os, "R", c.R);
  put(os, "regular_margin", c.regular_margin);
  os << "\n[transport]\n";
  put(os, "lambda", c.transport_lambda);
  put(os, "dt", c.transport_dt);
  put(os, "dx", c.transport_dx);
  put(os, "dxi", c.transport_dxi);
  put(os, "positions", c.transport_positions);
  put(os, "momenta", c.transport_momenta);
  put(os, "max_rho", c.max_rho);
  detail::put_bool(os, "halving", c.halving);
  put(os, "max_step", c.max_step);
  put(os, "r_cut", c.r_cut);
  os << "\n[run]\n";
  put(os, "outdir", c.outdir);
  put(os, "flow_mode", c.flow_mode);
  put(os, "steps", c.steps);
  put(os, "threads", c.threads);
  return os.str();
}

/// 64-bit FNV-1a of the canonical serialization.
inline std::string config_hash(const ScenarioConfig& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : serialize(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace wfl::experiments
