#pragma once

#include <cmath>
#include <sstream>
#include <type_traits>
#include <vector>

#include "wfl/fft.hpp"
#include "wfl/grid.hpp"

namespace wfl {

/// Spectral coefficients F[f](k) at the grid frequencies, FFT order.
template <std::size_t Dim>
struct Spectrum {
  GridSpec<Dim> grid;
  std::vector<cplx> coeffs;

  std::size_t size() const { return coeffs.size(); }
  Vec<Dim> wavevector(std::size_t flat) const { return grid.wavevector(flat); }

  /// Coefficient at a signed frequency index vector.
  cplx at(const std::array<long, Dim>& index) const {
    std::array<std::size_t, Dim> slot{};
    for (std::size_t a = 0; a < Dim; ++a) slot[a] = grid.slot(index[a]);
    return coeffs[grid.flatten(slot)];
  }
};

namespace detail {

// (-1)^{sum of signed indices}: converts between node origin -L and the FFT's
// origin at index 0, since e^{i k_m L} = (-1)^m.
template <std::size_t Dim>
double origin_sign(const GridSpec<Dim>& grid, std::size_t flat) {
  const auto idx = grid.unflatten(flat);
  long s = 0;
  for (std::size_t a = 0; a < Dim; ++a) s += grid.signed_index(idx[a]);
  return (s % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace detail

/// F[f](k) = int e^{-i x.k} f(x) dx as a Riemann sum with weight h^Dim.
template <std::size_t Dim>
Spectrum<Dim> forward(const ComplexField<Dim>& f) {
  Spectrum<Dim> s{f.grid, f.samples};
  fft::transform(s.coeffs, Dim, f.grid.points, -1);
  const double w = f.grid.cell_volume();
  for (std::size_t m = 0; m < s.size(); ++m) s.coeffs[m] *= w * detail::origin_sign(f.grid, m);
  return s;
}

/// F^{-1}[g](x) = (2 pi)^{-Dim} int e^{i x.k} g(k) dk with weight dk^Dim.
template <std::size_t Dim>
ComplexField<Dim> inverse(const Spectrum<Dim>& s) {
  ComplexField<Dim> f(s.grid);
  f.samples = s.coeffs;
  for (std::size_t m = 0; m < f.size(); ++m) f.samples[m] *= detail::origin_sign(s.grid, m);
  fft::transform(f.samples, Dim, s.grid.points, +1);
  const double w = std::pow(s.grid.frequency_spacing() / (2.0 * kPi), Dim);
  for (auto& z : f.samples) z *= w;
  return f;
}

/// F^{-1}[m(k) F[f]] for a multiplier m evaluated at every grid frequency.
/// The multiplier may return real or complex values.
template <std::size_t Dim, class Multiplier>
ComplexField<Dim> apply_multiplier(const ComplexField<Dim>& f, Multiplier&& m) {
  std::vector<cplx> values(f.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const cplx v = cplx(m(f.grid.wavevector(i)));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream os;
      os << "multiplier is not finite at grid frequency slot " << i;
      throw InvalidArgument(os.str());
    }
    values[i] = v;
  }
  ComplexField<Dim> out(f.grid, f.samples);
  fft::transform(out.samples, Dim, f.grid.points, -1);
  for (std::size_t i = 0; i < values.size(); ++i) out.samples[i] *= values[i];
  fft::transform(out.samples, Dim, f.grid.points, +1);
  const double inv = 1.0 / static_cast<double>(f.size());
  for (auto& z : out.samples) z *= inv;
  return out;
}

/// (-Delta)^{theta/2} as the multiplier |k|^theta, zero at k = 0.
template <std::size_t Dim>
ComplexField<Dim> fractional_laplacian(const ComplexField<Dim>& f, double theta) {
  if (!(theta > 0.0 && theta < 2.0)) {
    std::ostringstream os;
    os << "fractional order theta must lie in (0, 2), got " << theta;
    throw InvalidArgument(os.str());
  }
  return apply_multiplier(f, [theta](const Vec<Dim>& k) {
    const double r = norm<Dim>(k);
    return r == 0.0 ? 0.0 : std::pow(r, theta);
  });
}

/// Discrete L2 inner product sum conj(f) g h^Dim (conjugate-linear in f).
template <std::size_t Dim>
cplx inner(const ComplexField<Dim>& f, const ComplexField<Dim>& g) {
  if (!(f.grid == g.grid)) throw InvalidArgument("inner product of fields on different grids");
  cplx s{};
  for (std::size_t i = 0; i < f.size(); ++i) s += std::conj(f[i]) * g[i];
  return s * f.grid.cell_volume();
}

template <std::size_t Dim>
double l2_norm(const ComplexField<Dim>& f) {
  double s = 0.0;
  for (const auto& z : f.samples) s += std::norm(z);
  return std::sqrt(s * f.grid.cell_volume());
}

/// sum |F(k)|^2 dk^Dim, the spectral side of Parseval.
template <std::size_t Dim>
double spectral_energy(const Spectrum<Dim>& s) {
  double e = 0.0;
  for (const auto& z : s.coeffs) e += std::norm(z);
  return e * s.grid.frequency_cell_volume();
}

}  // namespace wfl
