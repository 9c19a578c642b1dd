// Follows the singularity of a delta under unit-speed dispersion: at t = 1
// the comoving probe decays slowly and the stationary probe fast.
#include <iomanip>
#include <iostream>

#include "wfl/wfl.hpp"

int main() {
  using namespace wfl;
  const auto grid = make_grid<1>(16.0, 4096);
  const auto u0 = experiments::delta_datum<1>(grid, {0.0});
  const auto ut = evolve(u0, EvolutionParams<1>{1.0, zero_potential<1>(), 1.0, default_steps(grid, 1.0, 1.0)});

  std::cout << std::setw(12) << "probe" << std::setw(10) << "slope" << "  class\n";
  for (const auto& [x, xi] : {std::pair{1.0, 1.0}, {0.0, 1.0}, {1.0, -1.0}, {-1.0, -1.0}}) {
    ProbeSpec<1> spec;
    spec.x0 = {x};
    spec.xi0 = {xi};
    spec.b = 0.45;
    const auto fit = probe_static(ut, spec);
    std::cout << std::setw(5) << x << ", " << std::setw(4) << xi << std::setw(10) << std::setprecision(3) << fit.slope
              << "  " << to_string(fit.classification) << '\n';
  }
}
