#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <vector>

#include "wfl/potential.hpp"
#include "wfl/spectral.hpp"

namespace wfl {

/// Parameters of i u_t = (-Delta)^{theta/2} u + V u on [0, t_final].
template <std::size_t Dim>
struct EvolutionParams {
  double theta = 1.0;
  PotentialSpec<Dim> potential = zero_potential<Dim>();
  double t_final = 0.0;
  std::size_t n_steps = 1;

  double dt() const { return t_final / static_cast<double>(n_steps); }

  void validate() const {
    // theta = 2 is accepted for validation against the classical Schroedinger flow.
    if (!(theta > 0.0 && theta <= 2.0)) throw InvalidArgument("theta must lie in (0, 2]");
    if (n_steps < 1) throw InvalidArgument("n_steps must be at least 1");
    if (!std::isfinite(t_final)) throw InvalidArgument("t_final must be finite");
  }
};

namespace detail {

inline void check_theta_closed(double theta) {
  if (!(theta > 0.0 && theta <= 2.0)) {
    std::ostringstream os;
    os << "theta must lie in (0, 2], got " << theta;
    throw InvalidArgument(os.str());
  }
}

template <std::size_t Dim>
std::vector<cplx> free_symbol(const GridSpec<Dim>& grid, double t, double theta) {
  std::vector<cplx> m(grid.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double r = norm<Dim>(grid.wavevector(i));
    const double w = r == 0.0 ? 0.0 : std::pow(r, theta);
    m[i] = std::polar(1.0, -t * w);
  }
  return m;
}

}  // namespace detail

/// Exact free flow: multiplier e^{-i t |k|^theta}; unitary on the grid.
template <std::size_t Dim>
ComplexField<Dim> free_evolve_exact(const ComplexField<Dim>& u0, double t, double theta) {
  detail::check_theta_closed(theta);
  if (t == 0.0) return u0;
  const auto sym = detail::free_symbol(u0.grid, t, theta);
  ComplexField<Dim> out(u0.grid, u0.samples);
  fft::transform(out.samples, Dim, u0.grid.points, -1);
  for (std::size_t i = 0; i < sym.size(); ++i) out.samples[i] *= sym[i];
  fft::transform(out.samples, Dim, u0.grid.points, +1);
  const double inv = 1.0 / static_cast<double>(out.size());
  for (auto& z : out.samples) z *= inv;
  return out;
}

/// Strang splitting for a fixed grid and step: half potential phase, exact
/// free step, half potential phase. Precomputes both factors once.
template <std::size_t Dim>
class StrangStepper {
 public:
  StrangStepper(const GridSpec<Dim>& grid, double dt, double theta, const PotentialSpec<Dim>& pot)
      : grid_(grid), dt_(dt), free_(detail::free_symbol(grid, dt, theta)), half_(grid.size()) {
    detail::check_theta_closed(theta);
    for (std::size_t i = 0; i < half_.size(); ++i)
      half_[i] = std::polar(1.0, -0.5 * dt * pot.value(grid.node(i)));
  }

  void step(ComplexField<Dim>& u) const {
    if (!(u.grid == grid_)) throw InvalidArgument("field grid does not match the stepper grid");
    if (dt_ == 0.0) return;
    for (std::size_t i = 0; i < u.size(); ++i) u.samples[i] *= half_[i];
    fft::transform(u.samples, Dim, grid_.points, -1);
    for (std::size_t i = 0; i < u.size(); ++i) u.samples[i] *= free_[i];
    fft::transform(u.samples, Dim, grid_.points, +1);
    const double inv = 1.0 / static_cast<double>(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) u.samples[i] *= inv * half_[i];
  }

  double dt() const { return dt_; }

 private:
  GridSpec<Dim> grid_;
  double dt_;
  std::vector<cplx> free_;
  std::vector<cplx> half_;
};

/// One Strang step u <- e^{-i dt V/2} e^{-i dt |D|^theta} e^{-i dt V/2} u.
template <std::size_t Dim>
ComplexField<Dim> strang_step(const ComplexField<Dim>& u, double dt, double theta, const PotentialSpec<Dim>& pot) {
  ComplexField<Dim> out = u;
  StrangStepper<Dim>(u.grid, dt, theta, pot).step(out);
  return out;
}

/// Fraction of L2 mass in the outer 10% shell of the box (any axis |x_a| >= 0.9 L).
template <std::size_t Dim>
double boundary_mass_fraction(const ComplexField<Dim>& u) {
  double outer = 0.0, total = 0.0;
  const double edge = 0.9 * u.grid.halfwidth;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double m = std::norm(u[i]);
    total += m;
    const auto x = u.grid.node(i);
    bool in_shell = false;
    for (std::size_t a = 0; a < Dim; ++a) in_shell = in_shell || std::abs(x[a]) >= edge;
    if (in_shell) outer += m;
  }
  return total > 0.0 ? outer / total : 0.0;
}

inline constexpr double kBoundaryMassWarning = 1e-8;

template <std::size_t Dim>
struct Snapshot {
  double t = 0.0;
  ComplexField<Dim> field;
};

template <std::size_t Dim>
struct Evolution {
  ComplexField<Dim> final;
  std::vector<Snapshot<Dim>> snapshots;
  double max_boundary_mass = 0.0;  // sampled at every snapshot and at the end
  bool boundary_warning() const { return max_boundary_mass > kBoundaryMassWarning; }
};

/// n_steps Strang steps; snapshots every `snapshot_every` steps (0 = none),
/// including t = 0 and the final time when enabled.
template <std::size_t Dim>
Evolution<Dim> evolve_with_snapshots(const ComplexField<Dim>& u0, const EvolutionParams<Dim>& params,
                                     std::size_t snapshot_every) {
  params.validate();
  Evolution<Dim> ev;
  ev.final = u0;
  const double dt = params.dt();
  const StrangStepper<Dim> stepper(u0.grid, dt, params.theta, params.potential);
  ev.max_boundary_mass = boundary_mass_fraction(u0);
  if (snapshot_every > 0) ev.snapshots.push_back({0.0, u0});
  for (std::size_t n = 1; n <= params.n_steps; ++n) {
    stepper.step(ev.final);
    if (snapshot_every > 0 && (n % snapshot_every == 0 || n == params.n_steps)) {
      ev.snapshots.push_back({static_cast<double>(n) * dt, ev.final});
      ev.max_boundary_mass = std::max(ev.max_boundary_mass, boundary_mass_fraction(ev.final));
    }
  }
  ev.max_boundary_mass = std::max(ev.max_boundary_mass, boundary_mass_fraction(ev.final));
  return ev;
}

template <std::size_t Dim>
ComplexField<Dim> evolve(const ComplexField<Dim>& u0, const EvolutionParams<Dim>& params) {
  return evolve_with_snapshots(u0, params, 0).final;
}

/// Step count keeping dt * max|k|^theta <= 0.5.
template <std::size_t Dim>
std::size_t default_steps(const GridSpec<Dim>& grid, double theta, double t) {
  const double kmax = grid.max_frequency() * (Dim == 2 ? std::sqrt(2.0) : 1.0);
  const double n = std::ceil(std::abs(t) * std::pow(kmax, theta) / 0.5);
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

}  // namespace wfl
