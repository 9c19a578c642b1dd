#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "wfl/cutoff.hpp"
#include "wfl/detector.hpp"
#include "wfl/grid.hpp"

namespace wfl::experiments {

/// Discrete impulse: h^{-Dim} at the node nearest x0, zero elsewhere.
template <std::size_t Dim>
ComplexField<Dim> delta_datum(const GridSpec<Dim>& grid, const Vec<Dim>& x0) {
  ComplexField<Dim> f(grid);
  std::array<std::size_t, Dim> idx{};
  for (std::size_t a = 0; a < Dim; ++a) idx[a] = grid.nearest_index(x0[a]);
  f.samples[grid.flatten(idx)] = cplx(1.0 / grid.cell_volume());
  return f;
}

/// chi(|x - x0|) H(x_1 - x0_1), chi = 1 within `width` and 0 beyond 2 width.
/// In 1D the only singular point is x0; in 2D the jump runs along x_1 = x0_1.
template <std::size_t Dim>
ComplexField<Dim> jump_datum(const GridSpec<Dim>& grid, const Vec<Dim>& x0, double width) {
  return sample(grid, [&](const Vec<Dim>& x) {
    const double step = x[0] >= x0[0] ? 1.0 : 0.0;
    return cplx(step * radial_bump(norm<Dim>(x - x0), width));
  });
}

template <std::size_t Dim>
ComplexField<Dim> gaussian_datum(const GridSpec<Dim>& grid, const Vec<Dim>& x0, double width) {
  return sample(grid, [&](const Vec<Dim>& x) {
    const Vec<Dim> d = x - x0;
    return cplx(std::exp(-dot<Dim>(d, d) / (2.0 * width * width)));
  });
}

template <std::size_t Dim>
ComplexField<Dim> modulate(ComplexField<Dim> f, const Vec<Dim>& k0) {
  for (std::size_t i = 0; i < f.size(); ++i) f.samples[i] *= std::polar(1.0, dot<Dim>(k0, f.grid.node(i)));
  return f;
}

template <std::size_t Dim>
ComplexField<Dim> make_datum(const std::string& kind, const GridSpec<Dim>& grid, const Vec<Dim>& x0, const Vec<Dim>& k0,
                             double width) {
  if (kind == "delta") return delta_datum(grid, x0);
  if (kind == "jump") return jump_datum(grid, x0, width);
  if (kind == "gaussian") return gaussian_datum(grid, x0, width);
  if (kind == "modulated_gaussian") return modulate(gaussian_datum(grid, x0, width), k0);
  if (kind == "plane_wave") return modulate(sample(grid, [](const Vec<Dim>&) { return cplx(1.0); }), k0);
  throw InvalidArgument("unknown initial data kind '" + kind + "'");
}

/// Expected class of a static probe at (x, xi) for a canonical datum, from its
/// known wave front set. Empty when the probe is too close to call.
template <std::size_t Dim>
std::optional<Classification> canonical_expectation(const std::string& kind, const Vec<Dim>& x0, double width,
                                                    const Vec<Dim>& x, const Vec<Dim>& xi, double margin,
                                                    double cone_halfangle) {
  if (kind == "gaussian" || kind == "modulated_gaussian" || kind == "plane_wave") return Classification::Regular;
  const double dist = norm<Dim>(x - x0);
  if (kind == "delta" || (kind == "jump" && Dim == 1)) {
    if (dist == 0.0) return Classification::Singular;
    if (dist >= margin) return Classification::Regular;
    return std::nullopt;
  }
  if (kind == "jump") {
    const double off_line = std::abs(x[0] - x0[0]);
    const double along = std::acos(std::min(1.0, std::abs(xi[0]) / norm<Dim>(xi)));
    if (off_line >= margin || dist >= 2.0 * width + margin) return Classification::Regular;
    if (off_line == 0.0 && dist <= width) {
      if (along <= cone_halfangle) return Classification::Singular;
      if (along >= cone_halfangle + margin) return Classification::Regular;
    }
    return std::nullopt;
  }
  throw InvalidArgument("unknown initial data kind '" + kind + "'");
}

}  // namespace wfl::experiments
