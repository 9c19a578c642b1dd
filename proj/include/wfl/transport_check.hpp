#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <json.hpp>

#include "wfl/cutoff.hpp"
#include "wfl/hamiltonian_flow.hpp"
#include "wfl/parallel.hpp"
#include "wfl/potential.hpp"
#include "wfl/propagator.hpp"
#include "wfl/wavepacket.hpp"

namespace wfl {

/// |eta|^theta = a(eta) + b(eta) with a = chi |eta|^theta supported in
/// |eta| <= 2 r_cut and b = (1 - chi) |eta|^theta vanishing for |eta| <= r_cut.
struct SymbolSplit {
  double theta = 1.0;
  double r_cut = 1.0;
};

/// r_cut = 0.25 * lambda_min / a.
inline SymbolSplit default_split(double theta, double lambda_min, double a) { return {theta, 0.25 * lambda_min / a}; }

template <std::size_t Dim>
double cutoff_chi(const Vec<Dim>& eta, const SymbolSplit& split) {
  return radial_bump(norm<Dim>(eta), split.r_cut);
}

template <std::size_t Dim>
double symbol_a(const Vec<Dim>& eta, const SymbolSplit& split) {
  return cutoff_chi<Dim>(eta, split) * std::pow(norm<Dim>(eta), split.theta);
}

/// b = |eta|^theta - a, so the partition is exact by construction.
template <std::size_t Dim>
double symbol_b(const Vec<Dim>& eta, const SymbolSplit& split) {
  const double full = std::pow(norm<Dim>(eta), split.theta);
  return full - cutoff_chi<Dim>(eta, split) * full;
}

/// grad b = (1 - chi) theta |eta|^{theta-2} eta - chi'(|eta|) |eta|^{theta-1} eta.
template <std::size_t Dim>
Vec<Dim> symbol_b_gradient(const Vec<Dim>& eta, const SymbolSplit& split) {
  const double r = norm<Dim>(eta);
  if (r <= split.r_cut) return Vec<Dim>{};
  const double chi = cutoff_chi<Dim>(eta, split);
  const double dchi = smooth_step_derivative((r - split.r_cut) / split.r_cut) / split.r_cut;
  const double c = (1.0 - chi) * split.theta * std::pow(r, split.theta - 2.0) - dchi * std::pow(r, split.theta - 1.0);
  return c * eta;
}

/// P(x, xi) = -b(xi) - V(x) + x . grad V(x).
template <std::size_t Dim>
double coefficient_P(const Vec<Dim>& x, const Vec<Dim>& xi, const PotentialSpec<Dim>& pot, const SymbolSplit& split) {
  return -symbol_b<Dim>(xi, split) - pot.value(x) + dot<Dim>(x, pot.gradient(x));
}

/// Fields at t - dt, t, t + dt.
template <std::size_t Dim>
struct SnapshotTriple {
  ComplexField<Dim> before, now, after;
  double t = 0.0;
  double dt = 0.0;
};

/// Evolves u0 to t - dt, then by dt twice, each stretch with Strang steps of
/// at most `max_step`.
template <std::size_t Dim>
SnapshotTriple<Dim> transport_snapshots(const ComplexField<Dim>& u0, double theta, const PotentialSpec<Dim>& pot,
                                        double t, double dt, double max_step) {
  if (!(dt > 0.0) || !(t - dt >= 0.0)) throw InvalidArgument("need dt > 0 and t >= dt");
  auto run = [&](const ComplexField<Dim>& u, double span) {
    if (span == 0.0) return u;
    EvolutionParams<Dim> p{theta, pot, span, static_cast<std::size_t>(std::max(1.0, std::ceil(span / max_step)))};
    return evolve(u, p);
  };
  SnapshotTriple<Dim> s;
  s.t = t;
  s.dt = dt;
  s.before = run(u0, t - dt);
  s.now = run(s.before, dt);
  s.after = run(s.now, dt);
  return s;
}

struct TransportReport {
  double lambda = 0.0;
  double b = 0.0;
  double theta = 0.0;
  double r_cut = 0.0;
  double dt = 0.0, dx = 0.0, dxi = 0.0;
  std::size_t lattice_points = 0;
  double max_residual = 0.0;  // max |R| over the lattice
  double max_term = 0.0;      // max over the lattice of the largest single term
  double rho = 0.0;

  nlohmann::json to_json() const {
    return {{"lambda", lambda},
            {"b", b},
            {"theta", theta},
            {"r_cut", r_cut},
            {"rho", rho},
            {"max_residual", max_residual},
            {"max_term", max_term},
            {"lattice_points", lattice_points},
            {"stencil", {{"dt", dt}, {"dx", dx}, {"dxi", dxi}}}};
  }
};

namespace detail {

template <std::size_t Dim>
void check_transport_inputs(const SnapshotTriple<Dim>& u, const ScaledWindow<Dim>& w,
                            const std::vector<PhasePoint<Dim>>& lattice, double dx, double dxi) {
  if (!(u.before.grid == u.now.grid) || !(u.now.grid == u.after.grid)) throw InvalidArgument("snapshot grids differ");
  if (!(u.dt > 0.0 && dx > 0.0 && dxi > 0.0)) throw InvalidArgument("stencil steps must be positive");
  const auto& g = u.now.grid;
  for (const auto& p : lattice)
    for (std::size_t a = 0; a < Dim; ++a) {
      if (std::abs(p.xi[a]) + dxi >= g.max_frequency()) {
        throw OutOfBand("transport stencil frequency outside the grid band",
                        next_power_of_two(2.0 * g.halfwidth * (std::abs(p.xi[a]) + dxi) / kPi + 1.0));
      }
      if (std::abs(p.x[a]) + dx + w.support_radius() > g.halfwidth) {
        throw InvalidArgument("transport stencil window leaves the computational box");
      }
    }
}

template <std::size_t Dim>
Vec<Dim> unit(std::size_t a, double h) {
  Vec<Dim> e{};
  e[a] = h;
  return e;
}

}  // namespace detail

/// Residual of (d_t + grad b . grad_x - grad V . grad_xi) W = i P W on a phase
/// lattice, with W = W_{phi_lambda} u by direct quadrature and centered
/// differences in t, x and xi. Lattice momenta are absolute (not unit scale).
template <std::size_t Dim>
TransportReport transport_residual(const SnapshotTriple<Dim>& u, double theta, const PotentialSpec<Dim>& pot,
                                   const SymbolSplit& split, const ScaledWindow<Dim>& w,
                                   const std::vector<PhasePoint<Dim>>& lattice, double dx, double dxi) {
  detail::check_transport_inputs(u, w, lattice, dx, dxi);
  struct Cell {
    double residual, term;
  };
  const auto cells = parallel_map<Cell>(lattice.size(), [&](std::size_t k) {
    const auto& p = lattice[k];
    const cplx W = wpt_direct(u.now, w, p.x, p.xi);
    const cplx Wt = (wpt_direct(u.after, w, p.x, p.xi) - wpt_direct(u.before, w, p.x, p.xi)) / (2.0 * u.dt);
    const Vec<Dim> gb = symbol_b_gradient<Dim>(p.xi, split);
    const Vec<Dim> gv = pot.gradient(p.x);
    cplx adv{}, force{};
    for (std::size_t a = 0; a < Dim; ++a) {
      const auto ex = detail::unit<Dim>(a, dx);
      const auto ek = detail::unit<Dim>(a, dxi);
      const cplx Wx = (wpt_direct(u.now, w, p.x + ex, p.xi) - wpt_direct(u.now, w, p.x - ex, p.xi)) / (2.0 * dx);
      const cplx Wk = (wpt_direct(u.now, w, p.x, p.xi + ek) - wpt_direct(u.now, w, p.x, p.xi - ek)) / (2.0 * dxi);
      adv += gb[a] * Wx;
      force += gv[a] * Wk;
    }
    const double P = coefficient_P<Dim>(p.x, p.xi, pot, split);
    const cplx iPW = cplx(0.0, P) * W;
    const cplx R = Wt + adv - force - iPW;
    const double term = std::max({std::abs(Wt), std::abs(adv), std::abs(force), std::abs(iPW)});
    return Cell{std::abs(R), term};
  });
  TransportReport rep;
  rep.lambda = w.lambda;
  rep.b = w.b;
  rep.theta = theta;
  rep.r_cut = split.r_cut;
  rep.dt = u.dt;
  rep.dx = dx;
  rep.dxi = dxi;
  rep.lattice_points = lattice.size();
  for (const auto& c : cells) {
    rep.max_residual = std::max(rep.max_residual, c.residual);
    rep.max_term = std::max(rep.max_term, c.term);
  }
  rep.rho = rep.max_term > 0.0 ? rep.max_residual / rep.max_term : 0.0;
  return rep;
}

/// The potential-free specialization (d_t + grad b . grad_x) W = -i b W,
/// evaluated with the same arithmetic as transport_residual.
template <std::size_t Dim>
TransportReport transport_residual_free(const SnapshotTriple<Dim>& u, const SymbolSplit& split,
                                        const ScaledWindow<Dim>& w, const std::vector<PhasePoint<Dim>>& lattice,
                                        double dx, double dxi) {
  detail::check_transport_inputs(u, w, lattice, dx, dxi);
  struct Cell {
    double residual, term;
  };
  const auto cells = parallel_map<Cell>(lattice.size(), [&](std::size_t k) {
    const auto& p = lattice[k];
    const cplx W = wpt_direct(u.now, w, p.x, p.xi);
    const cplx Wt = (wpt_direct(u.after, w, p.x, p.xi) - wpt_direct(u.before, w, p.x, p.xi)) / (2.0 * u.dt);
    const Vec<Dim> gb = symbol_b_gradient<Dim>(p.xi, split);
    cplx adv{};
    for (std::size_t a = 0; a < Dim; ++a) {
      const auto ex = detail::unit<Dim>(a, dx);
      const cplx Wx = (wpt_direct(u.now, w, p.x + ex, p.xi) - wpt_direct(u.now, w, p.x - ex, p.xi)) / (2.0 * dx);
      adv += gb[a] * Wx;
    }
    const cplx ibW = cplx(0.0, -symbol_b<Dim>(p.xi, split)) * W;
    const cplx R = Wt + adv - ibW;
    const double term = std::max({std::abs(Wt), std::abs(adv), 0.0, std::abs(ibW)});
    return Cell{std::abs(R), term};
  });
  TransportReport rep;
  rep.lambda = w.lambda;
  rep.b = w.b;
  rep.theta = split.theta;
  rep.r_cut = split.r_cut;
  rep.dt = u.dt;
  rep.dx = dx;
  rep.dxi = dxi;
  rep.lattice_points = lattice.size();
  for (const auto& c : cells) {
    rep.max_residual = std::max(rep.max_residual, c.residual);
    rep.max_term = std::max(rep.max_term, c.term);
  }
  rep.rho = rep.max_term > 0.0 ? rep.max_residual / rep.max_term : 0.0;
  return rep;
}

}  // namespace wfl
