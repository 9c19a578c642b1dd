#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "wfl/parallel.hpp"
#include "wfl/potential.hpp"

namespace wfl {

template <std::size_t Dim>
struct PhasePoint {
  Vec<Dim> x{};
  Vec<Dim> xi{};
};

/// Sampled solution of dx/ds = theta |xi|^{theta-2} xi, dxi/ds = -grad V(x),
/// from the terminal time s = t down to s = 0.
template <std::size_t Dim>
struct Trajectory {
  std::vector<double> s_values;
  std::vector<PhasePoint<Dim>> points;
  double theta = 1.0;
  double t = 0.0;
  double lambda = 1.0;
  PhasePoint<Dim> seed;  // (x, xi) with |xi| at unit scale

  const PhasePoint<Dim>& endpoint() const { return points.back(); }
};

/// H(x, xi) = |xi|^theta + V(x), conserved along the flow.
template <std::size_t Dim>
double hamiltonian(const PhasePoint<Dim>& p, double theta, const PotentialSpec<Dim>& pot) {
  return std::pow(norm<Dim>(p.xi), theta) + pot.value(p.x);
}

/// theta |xi|^{theta-2} xi.
template <std::size_t Dim>
Vec<Dim> group_velocity(const Vec<Dim>& xi, double theta) {
  const double r = norm<Dim>(xi);
  return (theta * std::pow(r, theta - 2.0)) * xi;
}

namespace detail {

template <std::size_t Dim>
PhasePoint<Dim> hamilton_rhs(const PhasePoint<Dim>& p, double theta, const PotentialSpec<Dim>& pot) {
  const Vec<Dim> g = pot.gradient(p.x);
  return {group_velocity<Dim>(p.xi, theta), -1.0 * g};
}

template <std::size_t Dim>
PhasePoint<Dim> axpy(const PhasePoint<Dim>& p, double h, const PhasePoint<Dim>& k) {
  return {p.x + h * k.x, p.xi + h * k.xi};
}

inline void guard_momentum(double s, double momentum, double lambda) {
  const double floor = std::max(1e-8, 0.01 * lambda);
  if (momentum < floor) {
    std::ostringstream os;
    os << "momentum collapsed to |xi| = " << momentum << " at s = " << s << " (guard " << floor
       << "); the potential or lambda is outside the admissible regime";
    throw MomentumCollapse(os.str(), s, momentum);
  }
}

}  // namespace detail

/// Classic RK4 from (s_from, start) to s_to with n_steps equal steps.
/// The momentum guard uses `lambda` as the scale.
template <std::size_t Dim>
Trajectory<Dim> integrate_hamilton(double theta, const PotentialSpec<Dim>& pot, const PhasePoint<Dim>& start,
                                   double s_from, double s_to, std::size_t n_steps, double lambda) {
  if (!(theta > 0.0 && theta < 2.0)) throw InvalidArgument("theta must lie in (0, 2)");
  if (n_steps == 0) throw InvalidArgument("n_steps must be positive");
  Trajectory<Dim> tr;
  tr.theta = theta;
  tr.lambda = lambda;
  tr.s_values.reserve(n_steps + 1);
  tr.points.reserve(n_steps + 1);
  tr.s_values.push_back(s_from);
  tr.points.push_back(start);
  detail::guard_momentum(s_from, norm<Dim>(start.xi), lambda);
  if (s_from == s_to) return tr;
  const double h = (s_to - s_from) / static_cast<double>(n_steps);
  PhasePoint<Dim> p = start;
  for (std::size_t n = 0; n < n_steps; ++n) {
    const double s = s_from + static_cast<double>(n) * h;
    const auto k1 = detail::hamilton_rhs(p, theta, pot);
    const auto k2 = detail::hamilton_rhs(detail::axpy(p, 0.5 * h, k1), theta, pot);
    const auto k3 = detail::hamilton_rhs(detail::axpy(p, 0.5 * h, k2), theta, pot);
    const auto k4 = detail::hamilton_rhs(detail::axpy(p, h, k3), theta, pot);
    for (std::size_t a = 0; a < Dim; ++a) {
      p.x[a] += h / 6.0 * (k1.x[a] + 2.0 * k2.x[a] + 2.0 * k3.x[a] + k4.x[a]);
      p.xi[a] += h / 6.0 * (k1.xi[a] + 2.0 * k2.xi[a] + 2.0 * k3.xi[a] + k4.xi[a]);
    }
    const double s_next = (n + 1 == n_steps) ? s_to : s + h;
    detail::guard_momentum(s_next, norm<Dim>(p.xi), lambda);
    if (!all_finite<Dim>(p.x) || !all_finite<Dim>(p.xi)) throw Error("Hamiltonian flow produced non-finite values");
    tr.s_values.push_back(s_next);
    tr.points.push_back(p);
  }
  return tr;
}

/// Step count resolving the lambda^{theta-1} transport speed:
/// max(200, ceil(40 t theta (C1 lambda)^{theta-1})) with C1 ~ a.
inline std::size_t default_flow_steps(double theta, double t, double lambda, double a = 1.0) {
  const double v = theta * std::pow(a * lambda, theta - 1.0);
  const double n = std::ceil(40.0 * std::abs(t) * v);
  return std::max<std::size_t>(200, static_cast<std::size_t>(std::isfinite(n) ? n : 200.0));
}

/// Backward terminal-value flow: x(t) = x, xi(t) = lambda xi, integrated to s = 0.
template <std::size_t Dim>
Trajectory<Dim> flow_backward(double theta, const PotentialSpec<Dim>& pot, double t, const Vec<Dim>& x,
                              const Vec<Dim>& xi, double lambda, std::size_t n_steps = 0) {
  if (norm<Dim>(xi) == 0.0) throw InvalidArgument("unit-scale momentum must be nonzero");
  if (n_steps == 0) n_steps = default_flow_steps(theta, t, lambda, std::max(norm<Dim>(xi), 1.0 / norm<Dim>(xi)));
  auto tr = integrate_hamilton<Dim>(theta, pot, {x, lambda * xi}, t, 0.0, n_steps, lambda);
  tr.t = t;
  tr.seed = {x, xi};
  return tr;
}

/// Closed-form potential-free flow at time s:
/// x(s) = x + (s - t) theta lambda^{theta-1} |xi|^{theta-2} xi, xi(s) = lambda xi.
template <std::size_t Dim>
PhasePoint<Dim> flow_free_closed_form(double theta, double t, const Vec<Dim>& x, const Vec<Dim>& xi, double lambda,
                                      double s) {
  const double r = norm<Dim>(xi);
  if (r == 0.0) throw InvalidArgument("momentum must be nonzero");
  const double c = (s - t) * theta * std::pow(lambda, theta - 1.0) * std::pow(r, theta - 2.0);
  return {x + c * xi, lambda * xi};
}

namespace detail {

// Cumulative integral on a uniform lattice, F_0 = 0, fourth-order local
// accuracy: Simpson on even nodes, the 3-point partial rule for odd ones.
inline std::vector<double> cumulative_integral(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> F(n, 0.0);
  if (n < 2) return F;
  if (n == 2) {
    F[1] = 0.5 * h * (f[0] + f[1]);
    return F;
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (i % 2 == 0) {
      F[i] = F[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
    } else if (i + 1 < n) {
      F[i] = F[i - 1] + h / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]);
    } else {
      F[i] = F[i - 1] + h / 12.0 * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]);
    }
  }
  return F;
}

}  // namespace detail

/// N-th Picard iterate on a uniform lattice of `lattice_points` times from
/// s = t down to 0. Iterate 0 is the frozen-momentum curve xi = lambda xi,
/// x = x + (s - t) theta |lambda xi|^{theta-2} lambda xi; iterate N+1 is
///   x^{N+1}(s)  = x + int_t^s theta |xi^N|^{theta-2} xi^N,
///   xi^{N+1}(s) = lambda xi - int_t^s grad V(x^N).
template <std::size_t Dim>
Trajectory<Dim> picard_solve(double theta, const PotentialSpec<Dim>& pot, double t, const Vec<Dim>& x,
                             const Vec<Dim>& xi, double lambda, int n_iterations, std::size_t lattice_points = 2001) {
  if (!(theta > 0.0 && theta < 2.0)) throw InvalidArgument("theta must lie in (0, 2)");
  if (n_iterations < 0) throw InvalidArgument("n_iterations must be non-negative");
  if (lattice_points < 2) throw InvalidArgument("Picard lattice needs at least two points");
  if (norm<Dim>(xi) == 0.0) throw InvalidArgument("unit-scale momentum must be nonzero");
  const std::size_t m = lattice_points;
  const double h = -t / static_cast<double>(m - 1);  // signed step in s

  Trajectory<Dim> tr;
  tr.theta = theta;
  tr.t = t;
  tr.lambda = lambda;
  tr.seed = {x, xi};
  tr.s_values.resize(m);
  for (std::size_t i = 0; i < m; ++i) tr.s_values[i] = (i + 1 == m) ? 0.0 : t + static_cast<double>(i) * h;

  const Vec<Dim> xi_t = lambda * xi;
  const Vec<Dim> v0 = group_velocity<Dim>(xi_t, theta);
  tr.points.resize(m);
  for (std::size_t i = 0; i < m; ++i) tr.points[i] = {x + (tr.s_values[i] - t) * v0, xi_t};

  std::vector<double> vel(m), force(m);
  for (int it = 0; it < n_iterations; ++it) {
    auto next = tr.points;
    for (std::size_t a = 0; a < Dim; ++a) {
      for (std::size_t i = 0; i < m; ++i) {
        vel[i] = group_velocity<Dim>(tr.points[i].xi, theta)[a];
        force[i] = pot.gradient(tr.points[i].x)[a];
      }
      const auto X = detail::cumulative_integral(vel, h);
      const auto P = detail::cumulative_integral(force, h);
      for (std::size_t i = 0; i < m; ++i) {
        next[i].x[a] = x[a] + X[i];
        next[i].xi[a] = xi_t[a] - P[i];
      }
    }
    for (std::size_t i = 0; i < m; ++i) detail::guard_momentum(tr.s_values[i], norm<Dim>(next[i].xi), lambda);
    tr.points = std::move(next);
  }
  return tr;
}

template <std::size_t Dim>
void write_trajectory_csv(std::ostream& os, const Trajectory<Dim>& tr, const PotentialSpec<Dim>& pot) {
  os << "s";
  for (std::size_t a = 0; a < Dim; ++a) os << ",x" << a;
  for (std::size_t a = 0; a < Dim; ++a) os << ",xi" << a;
  os << ",H\n" << std::setprecision(17);
  for (std::size_t i = 0; i < tr.points.size(); ++i) {
    os << tr.s_values[i];
    for (std::size_t a = 0; a < Dim; ++a) os << ',' << tr.points[i].x[a];
    for (std::size_t a = 0; a < Dim; ++a) os << ',' << tr.points[i].xi[a];
    os << ',' << hamiltonian(tr.points[i], tr.theta, pot) << '\n';
  }
}

struct LemmaRung {
  double lambda = 0.0;
  double xi_ratio_min = 0.0;  // min_s |xi(s)| / lambda over seeds
  double xi_ratio_max = 0.0;
  double x_scale_max = 0.0;   // max_s |x(s)| / lambda^{theta-1} (theta > 1) or max_s |x(s)|
  double x_scale_end = 0.0;   // min over seeds of |x(0)| / lambda^{theta-1} (theta > 1) or |x(0)|
  bool in_band = false;       // 0.5 a^{-1} lambda <= |xi(s)| <= 2 a lambda for all s, seeds
};

struct LemmaBoundsReport {
  double theta = 0.0;
  double t = 0.0;
  double a = 1.0;
  std::vector<LemmaRung> rungs;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
  std::optional<double> lambda0;
  // Relative spread (max - min) / max over the top three rungs.
  double xi_min_spread = 0.0, xi_max_spread = 0.0, x_max_spread = 0.0, x_end_spread = 0.0;
  bool stable = false;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["theta"] = theta;
    j["t"] = t;
    j["a"] = a;
    j["C1"] = c1;
    j["C2"] = c2;
    j["C3"] = c3;
    j["C4"] = c4;
    j["lambda0"] = lambda0 ? nlohmann::json(*lambda0) : nlohmann::json(nullptr);
    j["spread"] = {{"xi_min", xi_min_spread}, {"xi_max", xi_max_spread}, {"x_max", x_max_spread}, {"x_end", x_end_spread}};
    j["stable"] = stable;
    auto& arr = j["rungs"] = nlohmann::json::array();
    for (const auto& r : rungs)
      arr.push_back({{"lambda", r.lambda},
                     {"xi_ratio_min", r.xi_ratio_min},
                     {"xi_ratio_max", r.xi_ratio_max},
                     {"x_scale_max", r.x_scale_max},
                     {"x_scale_end", r.x_scale_end},
                     {"in_band", r.in_band}});
    return j;
  }
};

inline constexpr double kLemmaStabilityTolerance = 0.10;

/// Flows every seed backward over the lambda ladder and measures the
/// momentum band |xi(s)|/lambda and the position scale. For 1 < theta < 2 the
/// position scale is |x(s)|/lambda^{theta-1}; otherwise |x(s)| itself. The
/// lower position bound is read at the endpoint s = 0, where |s - t| is largest.
template <std::size_t Dim>
LemmaBoundsReport check_lemma_bounds(double theta, const PotentialSpec<Dim>& pot, double t,
                                     const std::vector<PhasePoint<Dim>>& seeds, const std::vector<double>& ladder,
                                     double a) {
  if (seeds.empty()) throw InvalidArgument("lemma check needs at least one seed");
  if (ladder.size() < 3) throw InvalidArgument("lemma check needs at least three ladder rungs");
  LemmaBoundsReport rep;
  rep.theta = theta;
  rep.t = t;
  rep.a = a;
  rep.rungs = parallel_map<LemmaRung>(ladder.size(), [&](std::size_t k) {
    const double lambda = ladder[k];
    const double xscale = theta > 1.0 ? std::pow(lambda, theta - 1.0) : 1.0;
    LemmaRung r;
    r.lambda = lambda;
    r.xi_ratio_min = std::numeric_limits<double>::infinity();
    r.x_scale_end = std::numeric_limits<double>::infinity();
    r.in_band = true;
    for (const auto& seed : seeds) {
      const auto tr = flow_backward<Dim>(theta, pot, t, seed.x, seed.xi, lambda);
      for (const auto& p : tr.points) {
        const double m = norm<Dim>(p.xi);
        r.xi_ratio_min = std::min(r.xi_ratio_min, m / lambda);
        r.xi_ratio_max = std::max(r.xi_ratio_max, m / lambda);
        r.x_scale_max = std::max(r.x_scale_max, norm<Dim>(p.x) / xscale);
        r.in_band = r.in_band && m >= 0.5 / a * lambda && m <= 2.0 * a * lambda;
      }
      r.x_scale_end = std::min(r.x_scale_end, norm<Dim>(tr.endpoint().x) / xscale);
    }
    return r;
  });

  rep.c1 = 0.0;
  rep.c2 = std::numeric_limits<double>::infinity();
  rep.c3 = 0.0;
  rep.c4 = std::numeric_limits<double>::infinity();
  for (const auto& r : rep.rungs) {
    rep.c1 = std::max(rep.c1, r.xi_ratio_max);
    rep.c2 = std::min(rep.c2, r.xi_ratio_min);
    rep.c3 = std::max(rep.c3, r.x_scale_max);
    rep.c4 = std::min(rep.c4, r.x_scale_end);
  }
  for (std::size_t k = 0; k < rep.rungs.size(); ++k) {
    bool all_above = true;
    for (std::size_t j = k; j < rep.rungs.size(); ++j) all_above = all_above && rep.rungs[j].in_band;
    if (all_above) {
      rep.lambda0 = rep.rungs[k].lambda;
      break;
    }
  }
  auto spread = [&](auto member) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t k = rep.rungs.size() - 3; k < rep.rungs.size(); ++k) {
      lo = std::min(lo, rep.rungs[k].*member);
      hi = std::max(hi, rep.rungs[k].*member);
    }
    return hi > 0.0 ? (hi - lo) / hi : 0.0;
  };
  rep.xi_min_spread = spread(&LemmaRung::xi_ratio_min);
  rep.xi_max_spread = spread(&LemmaRung::xi_ratio_max);
  rep.x_max_spread = spread(&LemmaRung::x_scale_max);
  rep.x_end_spread = spread(&LemmaRung::x_scale_end);
  const double tol = kLemmaStabilityTolerance;
  rep.stable = rep.c2 > 0.0 && rep.xi_min_spread <= tol && rep.xi_max_spread <= tol && rep.x_max_spread <= tol &&
               (theta <= 1.0 || rep.x_end_spread <= tol);
  return rep;
}

}  // namespace wfl
