#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wfl/cutoff.hpp"
#include "wfl/hamiltonian_flow.hpp"
#include "wfl/wavepacket.hpp"

namespace wfl {

enum class Classification { Regular, Singular, Inconclusive };

inline std::string to_string(Classification c) {
  switch (c) {
    case Classification::Regular: return "Regular";
    case Classification::Singular: return "Singular";
    case Classification::Inconclusive: return "Inconclusive";
  }
  return "?";
}

inline Classification classification_from_string(const std::string& s) {
  if (s == "Regular" || s == "regular") return Classification::Regular;
  if (s == "Singular" || s == "singular") return Classification::Singular;
  if (s == "Inconclusive" || s == "inconclusive") return Classification::Inconclusive;
  throw InvalidArgument("unknown classification '" + s + "'");
}

/// Regular and Singular disagree; Inconclusive contradicts neither.
inline bool contradicts(Classification a, Classification b) {
  return (a == Classification::Regular && b == Classification::Singular) ||
         (a == Classification::Singular && b == Classification::Regular);
}

struct Thresholds {
  double regular = -4.0;
  double singular = -1.0;
  double max_residual = 0.5;  // RMS of the log10 fit residuals
};

inline constexpr double kAbsoluteFloor = 1e-300;
inline constexpr double kRelativeFloor = 1e-14;

enum class Evaluator { Direct, Fast, Auto };

/// Phase-space probe around (x0, xi0): positions within K_radius of x0,
/// directions within cone_halfangle of xi0, radii in [1/a, a], scaled by
/// every rung of the lambda ladder.
template <std::size_t Dim>
struct ProbeSpec {
  std::string label;
  Vec<Dim> x0{};
  Vec<Dim> xi0{};  // normalized on use
  double K_radius = 0.1;
  double cone_halfangle = 0.2;
  double a = 1.5;
  double b = 0.25;
  std::vector<double> lambda_ladder{8, 16, 32, 64, 128};
  Window<Dim> window = gaussian_window<Dim>();
  std::size_t positions = 5;
  std::size_t directions = Dim == 1 ? 1 : 5;
  std::size_t radii = 3;
  Thresholds thresholds;

  void validate() const {
    std::vector<std::string> errs;
    if (!(b > 0.0 && b < 1.0)) errs.push_back("b must lie in (0, 1)");
    if (!(a >= 1.0)) errs.push_back("a must be >= 1");
    if (!(K_radius >= 0.0)) errs.push_back("K_radius must be non-negative");
    if (!(cone_halfangle >= 0.0 && cone_halfangle < kPi / 2)) errs.push_back("cone_halfangle must lie in [0, pi/2)");
    if (norm<Dim>(xi0) == 0.0) errs.push_back("xi0 must be nonzero");
    if (lambda_ladder.size() < 4) errs.push_back("lambda ladder needs at least 4 rungs");
    for (std::size_t i = 0; i < lambda_ladder.size(); ++i) {
      if (!(lambda_ladder[i] >= 1.0)) errs.push_back("ladder rungs must be >= 1");
      if (i > 0 && !(lambda_ladder[i] > lambda_ladder[i - 1])) errs.push_back("ladder must be strictly increasing");
    }
    if (positions == 0 || directions == 0 || radii == 0) errs.push_back("sample counts must be positive");
    if (!(thresholds.regular < thresholds.singular)) errs.push_back("regular threshold must be below singular threshold");
    if (!errs.empty()) {
      std::string msg = "invalid probe '" + label + "':";
      for (const auto& e : errs) msg += " " + e + ";";
      throw InvalidArgument(msg);
    }
  }

  /// Unit-scale sample points (x, xi) of K x (Gamma within the annulus).
  std::vector<PhasePoint<Dim>> lattice() const {
    std::vector<Vec<Dim>> xs, dirs;
    std::vector<double> rs;
    const double r0 = norm<Dim>(xi0);
    const Vec<Dim> u = (1.0 / r0) * xi0;
    if constexpr (Dim == 1) {
      if (positions == 1) {
        xs.push_back(x0);
      } else {
        for (std::size_t i = 0; i < positions; ++i)
          xs.push_back({x0[0] - K_radius + 2.0 * K_radius * static_cast<double>(i) / static_cast<double>(positions - 1)});
      }
      dirs.push_back(u);
    } else {
      xs.push_back(x0);
      for (std::size_t i = 1; i < positions; ++i) {
        const double ang = 2.0 * kPi * static_cast<double>(i - 1) / static_cast<double>(positions - 1);
        xs.push_back({x0[0] + K_radius * std::cos(ang), x0[1] + K_radius * std::sin(ang)});
      }
      const double base = std::atan2(u[1], u[0]);
      for (std::size_t i = 0; i < directions; ++i) {
        const double off = directions == 1 ? 0.0
                                           : -cone_halfangle + 2.0 * cone_halfangle * static_cast<double>(i) /
                                                                   static_cast<double>(directions - 1);
        dirs.push_back({std::cos(base + off), std::sin(base + off)});
      }
    }
    if (radii == 1) {
      rs.push_back(1.0);
    } else {
      for (std::size_t i = 0; i < radii; ++i)
        rs.push_back(std::pow(a, -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(radii - 1)));
    }
    std::vector<PhasePoint<Dim>> out;
    for (const auto& x : xs)
      for (const auto& d : dirs)
        for (double r : rs) out.push_back({x, r * d});
    return out;
  }

  /// Largest |xi| on the lattice times the top rung.
  double max_frequency_needed() const { return lambda_ladder.back() * a; }
};

struct DecayFit {
  std::string label;
  std::string window;
  std::vector<double> lambda_values;
  std::vector<double> sup_magnitudes;  // after clamping to floor
  std::vector<bool> clamped;
  double floor = kAbsoluteFloor;
  double slope = 0.0;
  double intercept = 0.0;  // log10 sup = intercept + slope log10 lambda
  double residual = 0.0;
  double rounding_residual = 0.0;  // largest |lambda xi - grid frequency| when rounded
  Classification classification = Classification::Inconclusive;

  struct Sample {
    double lambda;
    std::vector<double> x, xi;  // evaluation point (flowed endpoint for flowed probes)
    double magnitude;
  };
  std::vector<Sample> samples;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["label"] = label;
    j["window"] = window;
    j["lambda"] = lambda_values;
    j["sup"] = sup_magnitudes;
    j["clamped"] = clamped;
    j["floor"] = floor;
    j["slope"] = slope;
    j["intercept"] = intercept;
    j["residual"] = residual;
    j["rounding_residual"] = rounding_residual;
    j["class"] = to_string(classification);
    return j;
  }

  /// Per-point magnitudes: lambda, x..., xi..., magnitude.
  void write_csv(std::ostream& os) const {
    const std::size_t d = samples.empty() ? 0 : samples.front().x.size();
    os << "lambda";
    for (std::size_t a = 0; a < d; ++a) os << ",x" << a;
    for (std::size_t a = 0; a < d; ++a) os << ",xi" << a;
    os << ",magnitude\n" << std::setprecision(17);
    for (const auto& s : samples) {
      os << s.lambda;
      for (double v : s.x) os << ',' << v;
      for (double v : s.xi) os << ',' << v;
      os << ',' << s.magnitude << '\n';
    }
  }
};

/// Least-squares fit of log10 sup against log10 lambda. Magnitudes below
/// `floor` are clamped to it and flagged.
inline DecayFit fit_decay(const std::vector<double>& lambdas, const std::vector<double>& sups, double floor) {
  if (lambdas.size() != sups.size() || lambdas.size() < 2) throw InvalidArgument("fit needs matching series of >= 2 points");
  DecayFit fit;
  fit.floor = std::max(floor, kAbsoluteFloor);
  fit.lambda_values = lambdas;
  const std::size_t n = lambdas.size();
  std::vector<double> X(n), Y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sups[i] >= 0.0)) throw InvalidArgument("magnitudes must be non-negative");
    const bool low = sups[i] < fit.floor;
    fit.clamped.push_back(low);
    fit.sup_magnitudes.push_back(low ? fit.floor : sups[i]);
    X[i] = std::log10(lambdas[i]);
    Y[i] = std::log10(fit.sup_magnitudes[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += X[i];
    my += Y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("lambda values must not all coincide");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = Y[i] - (fit.intercept + fit.slope * X[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

/// Finite-order surrogate for rapid decay. A series that reaches the floor
/// while never increasing is Regular whatever its fitted slope, because
/// super-polynomial decay does not fit a line.
inline Classification classify(const DecayFit& fit, const Thresholds& th = {}) {
  if (!(th.regular < th.singular)) throw InvalidArgument("regular threshold must be below singular threshold");
  const auto& m = fit.sup_magnitudes;
  const bool all_clamped = std::all_of(fit.clamped.begin(), fit.clamped.end(), [](bool c) { return c; });
  const bool any_clamped = std::any_of(fit.clamped.begin(), fit.clamped.end(), [](bool c) { return c; });
  bool nonincreasing = true;
  for (std::size_t i = 1; i < m.size(); ++i) nonincreasing = nonincreasing && m[i] <= m[i - 1];
  if (all_clamped) return Classification::Regular;
  if (any_clamped && nonincreasing) return Classification::Regular;
  if (fit.slope <= th.regular && (fit.residual <= th.max_residual || nonincreasing)) return Classification::Regular;
  if (fit.slope >= th.singular && fit.residual <= th.max_residual) return Classification::Singular;
  return Classification::Inconclusive;
}

inline Classification classify(const DecayFit& fit, double regular_threshold, double singular_threshold) {
  return classify(fit, Thresholds{regular_threshold, singular_threshold, 0.5});
}

namespace detail {

template <std::size_t Dim>
void check_in_band(const GridSpec<Dim>& grid, const Vec<Dim>& xi) {
  for (std::size_t a = 0; a < Dim; ++a) {
    if (std::abs(xi[a]) >= grid.max_frequency()) {
      std::ostringstream os;
      os << "probe frequency " << xi[a] << " is outside the grid band (max " << grid.max_frequency()
         << "); use at least N = "
         << next_power_of_two(2.0 * grid.halfwidth * std::abs(xi[a]) / kPi + 1.0) << " points";
      throw OutOfBand(os.str(), next_power_of_two(2.0 * grid.halfwidth * std::abs(xi[a]) / kPi + 1.0));
    }
  }
}

template <std::size_t Dim>
double wpt_floor(const ComplexField<Dim>& f, const Window<Dim>& w) {
  const double scale = window_norm(ScaledWindow<Dim>::unscaled(w), f.grid) * l2_norm(f);
  return std::max(kRelativeFloor * scale, kAbsoluteFloor);
}

template <std::size_t Dim>
std::vector<double> to_vector(const Vec<Dim>& v) {
  return std::vector<double>(v.begin(), v.end());
}

// Evaluates all (rung, lattice point) pairs in parallel, reduces to a sup
// per rung in index order, then fits and classifies.
template <std::size_t Dim, class Eval>
DecayFit run_probe(const ProbeSpec<Dim>& probe, double floor, Eval&& eval) {
  const auto pts = probe.lattice();
  const std::size_t nr = probe.lambda_ladder.size();
  struct Cell {
    PhasePoint<Dim> at;
    double magnitude = 0.0;
    double rounding = 0.0;
  };
  const auto cells = parallel_map<Cell>(nr * pts.size(), [&](std::size_t k) {
    const std::size_t r = k / pts.size();
    const auto& p = pts[k % pts.size()];
    const auto w = scale_window(probe.window, probe.b, probe.lambda_ladder[r]);
    Cell c;
    eval(w, probe.lambda_ladder[r], p, c.at, c.magnitude, c.rounding);
    return c;
  });
  std::vector<double> sups(nr, 0.0);
  double rounding = 0.0;
  std::vector<DecayFit::Sample> samples;
  samples.reserve(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const std::size_t r = k / pts.size();
    sups[r] = std::max(sups[r], cells[k].magnitude);
    rounding = std::max(rounding, cells[k].rounding);
    samples.push_back({probe.lambda_ladder[r], to_vector<Dim>(cells[k].at.x), to_vector<Dim>(cells[k].at.xi),
                       cells[k].magnitude});
  }
  DecayFit fit = fit_decay(probe.lambda_ladder, sups, floor);
  fit.label = probe.label;
  fit.window = probe.window.label;
  fit.rounding_residual = rounding;
  fit.samples = std::move(samples);
  fit.classification = classify(fit, probe.thresholds);
  return fit;
}

template <std::size_t Dim>
Vec<Dim> round_to_grid_frequency(const GridSpec<Dim>& grid, const Vec<Dim>& xi) {
  Vec<Dim> r{};
  for (std::size_t a = 0; a < Dim; ++a) r[a] = std::round(xi[a] / grid.frequency_spacing()) * grid.frequency_spacing();
  return r;
}

template <std::size_t Dim>
Vec<Dim> round_to_grid_node(const GridSpec<Dim>& grid, const Vec<Dim>& x) {
  Vec<Dim> r{};
  for (std::size_t a = 0; a < Dim; ++a) r[a] = grid.coordinate(grid.nearest_index(x[a]));
  return r;
}

}  // namespace detail

/// Static decay test: sup over the probe lattice of |W_{phi_lambda}[f](x, lambda xi)|
/// per rung, fitted against lambda. Direct quadrature evaluates exactly at
/// (x, lambda xi); Fast rounds both to the grid and records the frequency
/// rounding residual; Auto uses Fast only when that residual is negligible.
template <std::size_t Dim>
DecayFit probe_static(const ComplexField<Dim>& f, const ProbeSpec<Dim>& probe, Evaluator evaluator = Evaluator::Direct) {
  probe.validate();
  f.validate();
  const auto& grid = f.grid;
  Vec<Dim> reach{};
  for (const auto& p : probe.lattice())
    for (std::size_t a = 0; a < Dim; ++a) reach[a] = std::max(reach[a], probe.lambda_ladder.back() * std::abs(p.xi[a]));
  detail::check_in_band(grid, reach);
  const double floor = detail::wpt_floor(f, probe.window);
  const double tol = grid.frequency_spacing() / 2.0 * 1e-6;
  return detail::run_probe<Dim>(probe, floor,
                                [&](const ScaledWindow<Dim>& w, double lambda, const PhasePoint<Dim>& p,
                                    PhasePoint<Dim>& at, double& mag, double& rounding) {
                                  const Vec<Dim> xi = lambda * p.xi;
                                  const Vec<Dim> xr = detail::round_to_grid_frequency(grid, xi);
                                  const double res = norm<Dim>(xi - xr);
                                  const bool fast = evaluator == Evaluator::Fast || (evaluator == Evaluator::Auto && res <= tol);
                                  if (fast) {
                                    const Vec<Dim> xn = detail::round_to_grid_node(grid, p.x);
                                    at = {xn, xr};
                                    rounding = res;
                                    mag = std::abs(wpt_fast(f, w, {xn}, {xr}).values[0]);
                                  } else {
                                    at = {p.x, xi};
                                    mag = std::abs(wpt_direct(f, w, p.x, xi));
                                  }
                                });
}

enum class FlowMode { Full, Free, Frozen };

inline std::string to_string(FlowMode m) {
  switch (m) {
    case FlowMode::Full: return "full";
    case FlowMode::Free: return "free";
    case FlowMode::Frozen: return "frozen";
  }
  return "?";
}

inline FlowMode flow_mode_from_string(const std::string& s) {
  if (s == "full") return FlowMode::Full;
  if (s == "free") return FlowMode::Free;
  if (s == "frozen") return FlowMode::Frozen;
  throw InvalidArgument("unknown flow mode '" + s + "' (expected full, free or frozen)");
}

/// Box and derivative order used to certify the growth condition before a
/// full-mode flowed probe.
inline constexpr double kGrowthCheckBox = 64.0;
inline constexpr int kGrowthCheckOrders = 4;

/// Throws InvalidArgument listing why `mode` is not admissible for this
/// theta, potential and window exponent.
template <std::size_t Dim>
void check_flow_admissible(double theta, const PotentialSpec<Dim>& pot, double b, FlowMode mode) {
  std::vector<std::string> errs;
  if (!(theta > 0.0 && theta < 2.0)) errs.push_back("theta must lie in (0, 2)");
  if (!(b < (2.0 - theta) / 2.0)) {
    std::ostringstream os;
    os << "b >= (2-theta)/2 = " << (2.0 - theta) / 2.0 << " (got b = " << b << ")";
    errs.push_back(os.str());
  }
  if (errs.empty()) {
    switch (mode) {
      case FlowMode::Full: {
        if (!pot.is_zero()) {
          const auto rep = check_growth_assumption(pot, theta, kGrowthCheckBox, std::min(kGrowthCheckOrders, pot.max_order));
          if (!rep.pass) errs.push_back("full mode requires the growth condition on V");
        }
        break;
      }
      case FlowMode::Free: {
        if (theta > 1.0) {
          const auto sr = check_shortrange(pot, theta);
          if (!sr.admissible()) {
            errs.push_back("free mode requires a short-range potential: " + sr.reason);
          } else if (!sr.interval->contains(b)) {
            std::ostringstream os;
            os << "free mode requires b in (" << sr.interval->lo << ", " << sr.interval->hi << ")";
            errs.push_back(os.str());
          }
        }
        break;
      }
      case FlowMode::Frozen:
        if (!(theta < 1.0)) errs.push_back("frozen mode requires theta < 1");
        break;
    }
  }
  if (!errs.empty()) {
    std::string msg = "flow mode '" + to_string(mode) + "' not admissible:";
    for (const auto& e : errs) msg += " " + e + ";";
    throw InvalidArgument(msg);
  }
}

/// Flowed decay test: for each rung and lattice point (x, xi), evaluates
/// |W_{phi_lambda}[u0]| at the s = 0 endpoint of the backward flow started
/// from (x, lambda xi) at time t, by direct quadrature.
template <std::size_t Dim>
DecayFit probe_flowed(const ComplexField<Dim>& u0, double theta, const PotentialSpec<Dim>& pot, double t,
                      const ProbeSpec<Dim>& probe, FlowMode mode) {
  probe.validate();
  u0.validate();
  check_flow_admissible(theta, pot, probe.b, mode);
  const auto& grid = u0.grid;
  const double floor = detail::wpt_floor(u0, probe.window);
  return detail::run_probe<Dim>(
      probe, floor,
      [&](const ScaledWindow<Dim>& w, double lambda, const PhasePoint<Dim>& p, PhasePoint<Dim>& at, double& mag,
          double&) {
        switch (mode) {
          case FlowMode::Full: at = flow_backward<Dim>(theta, pot, t, p.x, p.xi, lambda).endpoint(); break;
          case FlowMode::Free:
            at = t == 0.0 ? PhasePoint<Dim>{p.x, lambda * p.xi} : flow_free_closed_form<Dim>(theta, t, p.x, p.xi, lambda, 0.0);
            break;
          case FlowMode::Frozen: at = {p.x, lambda * p.xi}; break;
        }
        detail::check_in_band(grid, at.xi);
        mag = std::abs(wpt_direct(u0, w, at.x, at.xi));
      });
}

/// Smooth cutoff centered at x0: 1 within width/2, 0 beyond width.
template <std::size_t Dim>
double cone_cutoff(const Vec<Dim>& x, const Vec<Dim>& x0, double width) {
  return radial_bump(norm<Dim>(x - x0), width / 2.0);
}

/// Fourier-cone test: sup of |F[chi f](k)| over grid frequencies with
/// R <= |k| <= 2R and angle(k, xi0) <= cone_halfangle, fitted against R.
template <std::size_t Dim>
DecayFit fourier_cone_decay(const ComplexField<Dim>& f, const Vec<Dim>& x0, const Vec<Dim>& xi0, double cutoff_width,
                            double cone_halfangle, const std::vector<double>& R_ladder, const Thresholds& th = {}) {
  f.validate();
  if (!(cutoff_width > 0.0)) throw InvalidArgument("cutoff_width must be positive");
  if (norm<Dim>(xi0) == 0.0) throw InvalidArgument("xi0 must be nonzero");
  if (R_ladder.size() < 2) throw InvalidArgument("R ladder needs at least two rungs");
  const auto& grid = f.grid;
  for (double R : R_ladder) {
    if (!(R > 0.0)) throw InvalidArgument("R must be positive");
    if (2.0 * R >= grid.max_frequency()) {
      std::ostringstream os;
      os << "cone shell up to |k| = " << 2.0 * R << " exceeds the grid band (max " << grid.max_frequency() << ")";
      throw OutOfBand(os.str(), next_power_of_two(2.0 * grid.halfwidth * 2.0 * R / kPi + 1.0));
    }
  }
  ComplexField<Dim> g(grid);
  double l1 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.samples[i] = cone_cutoff<Dim>(grid.node(i), x0, cutoff_width) * f.samples[i];
    l1 += std::abs(g.samples[i]);
  }
  l1 *= grid.cell_volume();
  const auto spec = forward(g);
  const Vec<Dim> u = (1.0 / norm<Dim>(xi0)) * xi0;
  const double cos_min = std::cos(cone_halfangle);
  std::vector<double> sups(R_ladder.size(), 0.0);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const Vec<Dim> k = grid.wavevector(i);
    const double r = norm<Dim>(k);
    if (r == 0.0 || dot<Dim>(k, u) < cos_min * r) continue;
    const double m = std::abs(spec.coeffs[i]);
    for (std::size_t j = 0; j < R_ladder.size(); ++j)
      if (r >= R_ladder[j] && r <= 2.0 * R_ladder[j]) sups[j] = std::max(sups[j], m);
  }
  DecayFit fit = fit_decay(R_ladder, sups, std::max(kRelativeFloor * l1, kAbsoluteFloor));
  fit.label = "fourier_cone";
  fit.window = "cutoff";
  fit.classification = classify(fit, th);
  return fit;
}

}  // namespace wfl
