// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wfl/wfl.hpp"

using namespace wfl;
using namespace wfl::experiments;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

ComplexField<1> noise(const GridSpec<1>& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexField<1> f(g);
  for (auto& z : f.samples) z = cplx(u(rng), u(rng));
  return f;
}

ComplexField<1> delta_at(const GridSpec<1>& g, double x0) {
  ComplexField<1> f(g);
  f.samples[g.nearest_index(x0)] = cplx(1.0 / g.spacing());
  return f;
}

double relative_l2(const ComplexField<1>& a, const ComplexField<1>& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - ref[i]);
    den += std::norm(ref[i]);
  }
  return std::sqrt(num / den);
}

double endpoint_distance(const PhasePoint<1>& a, const PhasePoint<1>& b, double lambda) {
  return std::max(std::abs(a.x[0] - b.x[0]), std::abs(a.xi[0] - b.xi[0]) / lambda);
}

RunReport run_preset(const std::string& name) {
  RunOptions opts;
  opts.write_artifacts = false;
  return run_scenario(load_preset(name), opts);
}

// Every verdict whose name starts with `prefix` passes, and there are at least `minimum`.
void require_verdicts(Outcome& o, const RunReport& rep, const std::string& prefix, std::size_t minimum) {
  std::size_t n = 0, ok = 0;
  for (const auto& v : rep.verdicts)
    if (v.name.rfind(prefix, 0) == 0) {
      ++n;
      ok += v.status == Status::Pass;
      if (v.status != Status::Pass) o.detail << "{" << v.name << " @ " << v.probe << ": " << v.measured << "} ";
    }
  o.detail << prefix << " " << ok << "/" << n << "; ";
  o.require(n >= minimum && ok == n, prefix);
}

// Sum of |W|^2 h dk over the full lattice straight from the definition.
double brute_lattice_energy(const ComplexField<1>& f, const ScaledWindow<1>& w) {
  const auto& g = f.grid;
  const std::size_t n = g.points;
  const double h = g.spacing();
  double total = 0.0;
  for (std::size_t ix = 0; ix < n; ++ix)
    for (double k : g.frequencies()) {
      cplx acc{};
      for (std::size_t m = 0; m < n; ++m) {
        const double d = g.coordinate(m);
        const std::size_t j = (ix + m + n / 2) % n;
        acc += std::conj(w(Vec<1>{d})) * f[j] * std::polar(1.0, -(g.coordinate(ix) + d) * k);
      }
      total += std::norm(acc * h);
    }
  return total * h * g.frequency_spacing();
}

double lattice_energy(const ComplexField<1>& f, const ScaledWindow<1>& w) {
  std::vector<Vec<1>> xs, ks;
  for (std::size_t i = 0; i < f.grid.size(); ++i) xs.push_back(f.grid.node(i));
  for (double k : f.grid.frequencies()) ks.push_back({k});
  const auto slice = wpt_fast(f, w, xs, ks);
  double s = 0.0;
  for (const auto& v : slice.values) s += std::norm(v);
  return s * f.grid.spacing() * f.grid.frequency_spacing();
}

void wpt_equivalence(Outcome& o) {
  const Stopwatch clock;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ub(0.1, 0.9), ul(1.0, 300.0);
  double worst = 0.0;
  for (std::size_t n : {128u, 256u}) {
    const auto g = make_grid<1>(8.0, n);
    std::uniform_int_distribution<long> ui(0, static_cast<long>(n) - 1);
    std::uniform_int_distribution<long> uk(-static_cast<long>(n) / 2, static_cast<long>(n) / 2 - 1);
    for (int c = 0; c < 50; ++c) {
      const auto f = noise(g, 100 + c);
      const auto w = scale_window(c % 2 ? hermite1_window<1>() : gaussian_window<1>(), ub(rng), ul(rng));
      const Vec<1> x = g.node(static_cast<std::size_t>(ui(rng)));
      const Vec<1> xi{static_cast<double>(uk(rng)) * g.frequency_spacing()};
      const cplx direct = wpt_direct(f, w, x, xi);
      const cplx fast = wpt_fast(f, w, {x}, {xi})(0, 0);
      worst = std::max(worst, std::abs(fast - direct) / std::abs(direct));
    }
  }
  const double secs = clock.seconds();
  o.detail << "max relative error " << worst << " over 100 cases, " << secs << " s";
  o.require(worst < 1e-10, "relative error");
  o.require(secs < 10.0, "runtime");
}

void wpt_norm_identity(Outcome& o) {
  const auto small = make_grid<1>(4.0, 16);
  const auto fs = noise(small, 5);
  const auto ws = ScaledWindow<1>::unscaled(gaussian_window<1>());
  const double nf = l2_norm(fs), nw = window_norm(ws, small);
  const double brute = brute_lattice_energy(fs, ws) / (nf * nf * nw * nw);
  const double constant = 2.0 * kPi;
  const double small_err = std::abs(brute - constant) / constant;
  const double fast_small = std::abs(lattice_energy(fs, ws) / (nf * nf * nw * nw) - constant) / constant;
  double big_err = 0.0;
  const auto g = make_grid<1>(8.0, 256);
  for (unsigned seed : {1u, 2u}) {
    const auto f = noise(g, seed);
    for (const auto& w : {scale_window(gaussian_window<1>(), 0.5, 16.0), scale_window(hermite1_window<1>(), 0.3, 50.0)}) {
      const double a = l2_norm(f), b = window_norm(w, g);
      big_err = std::max(big_err, std::abs(lattice_energy(f, w) / (a * a * b * b) - constant) / constant);
    }
  }
  o.detail << "N=16 brute constant " << brute << " (rel " << small_err << "), fast N=16 rel " << fast_small
           << ", N=256 rel " << big_err;
  o.require(small_err < 1e-6 && fast_small < 1e-6, "N=16 oracle");
  o.require(big_err < 1e-6, "N=256");
}

void delta_scaling(Outcome& o) {
  const auto g = make_grid<1>(16.0, 4096);
  ProbeSpec<1> p;
  p.label = "delta";
  p.x0 = {0.0};
  p.xi0 = {1.0};
  p.b = 0.25;
  const auto on = probe_static(delta_at(g, 0.0), p);
  p.x0 = {3.0};
  const auto off = probe_static(delta_at(g, 0.0), p);
  o.detail << "on-center slope " << on.slope << ", off-center slope " << off.slope;
  o.require(std::abs(on.slope - 0.125) <= 0.01, "on-center slope");
  o.require(off.slope <= -6.0, "off-center slope");
}

void propagator_checks(Outcome& o) {
  const Stopwatch clock;
  auto packet = [](const GridSpec<1>& g, double k0) {
    return sample(g, [=](const Vec<1>& x) { return std::exp(-x[0] * x[0] / 2.0) * std::polar(1.0, k0 * x[0]); });
  };
  const auto g = make_grid<1>(16.0, 512);
  const auto u0 = packet(g, 3.0);
  const auto u = evolve(u0, EvolutionParams<1>{1.5, bump_potential<1>(1.0, 2.0), 1.0, 1000});
  const double drift = std::abs(l2_norm(u) - l2_norm(u0)) / l2_norm(u0);

  const auto g2 = make_grid<1>(16.0, 256);
  const auto v0 = packet(g2, 2.0);
  const auto pot = bump_potential<1>(1.0, 2.0);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double theta : {0.5, 1.0, 1.5}) {
    const std::size_t n = 40;
    const auto coarse = evolve(v0, EvolutionParams<1>{theta, pot, 0.5, n});
    const auto fine = evolve(v0, EvolutionParams<1>{theta, pot, 0.5, 2 * n});
    const auto ref = evolve(v0, EvolutionParams<1>{theta, pot, 0.5, 16 * n});
    const double order = std::log2(relative_l2(coarse, ref) / relative_l2(fine, ref));
    lo = std::min(lo, order);
    hi = std::max(hi, order);
  }

  double free_err = 0.0;
  for (double theta : {0.5, 1.0, 1.5}) {
    const auto f = noise(g2, 3);
    const auto split = evolve(f, EvolutionParams<1>{theta, zero_potential<1>(), 0.7, 100});
    const auto exact = free_evolve_exact(f, 0.7, theta);
    for (std::size_t i = 0; i < f.size(); ++i) free_err = std::max(free_err, std::abs(split[i] - exact[i]));
  }
  const double secs = clock.seconds();
  o.detail << "norm drift " << drift << ", orders [" << lo << ", " << hi << "], V=0 max diff " << free_err << ", "
           << secs << " s";
  o.require(drift < 1e-10, "unitarity");
  o.require(lo >= 1.8 && hi <= 2.2, "order");
  o.require(free_err < 1e-12, "V=0 path");
  o.require(secs < 30.0, "runtime");
}

void flow_checks(Outcome& o) {
  const auto pot = bump_potential<1>(1.0, 2.0);
  const double lambda = 32.0, t = 0.5;
  const auto tr = flow_backward<1>(1.5, pot, t, {0.5}, {1.0}, lambda);
  const double h0 = hamiltonian(tr.points.front(), 1.5, pot);
  double energy = 0.0;
  for (const auto& p : tr.points) energy = std::max(energy, std::abs(hamiltonian(p, 1.5, pot) - h0) / h0);

  double closed = 0.0;
  for (double theta : {0.4, 1.0, 1.7}) {
    const auto rk = flow_backward<1>(theta, zero_potential<1>(), 0.8, {0.3}, {-1.2}, 20.0).endpoint();
    const auto cf = flow_free_closed_form<1>(theta, 0.8, {0.3}, {-1.2}, 20.0, 0.0);
    closed = std::max({closed, std::abs(rk.x[0] - cf.x[0]), std::abs(rk.xi[0] - cf.xi[0])});
  }

  const std::size_t n = 40;
  const auto ref = flow_backward<1>(1.5, pot, t, {0.5}, {1.0}, lambda, 64 * n).endpoint();
  const double e1 = endpoint_distance(flow_backward<1>(1.5, pot, t, {0.5}, {1.0}, lambda, n).endpoint(), ref, lambda);
  const double e2 = endpoint_distance(flow_backward<1>(1.5, pot, t, {0.5}, {1.0}, lambda, 2 * n).endpoint(), ref, lambda);
  const double ratio = e1 / e2;

  const auto rk = flow_backward<1>(1.5, pot, t, {0.5}, {1.0}, lambda, 20000).endpoint();
  bool monotone = true;
  double previous = std::numeric_limits<double>::infinity(), last = 0.0;
  for (int k = 1; k <= 6; ++k) {
    last = endpoint_distance(picard_solve<1>(1.5, pot, t, {0.5}, {1.0}, lambda, k).endpoint(), rk, lambda);
    monotone = monotone && last < previous;
    previous = last;
  }
  o.detail << "energy drift " << energy << ", closed form diff " << closed << ", RK ratio " << ratio
           << ", Picard distance after 6 iterations " << last;
  o.require(energy < 1e-8, "energy");
  o.require(closed < 1e-10, "closed form");
  o.require(ratio >= 10.0 && ratio <= 24.0, "RK ratio");
  o.require(monotone, "Picard monotone");
}

void lemma_checks(Outcome& o) {
  const auto rep = run_preset("lemma_bounds");
  const auto& l = rep.extra["lemma"];
  o.detail << "theta 1.5 spreads " << l["spread"].dump() << "; ";
  require_verdicts(o, rep, "lambda_uniform_bounds", 1);

  const auto cfg = load_preset("lemma_bounds");
  std::vector<PhasePoint<1>> seeds;
  for (const auto& p : cfg.probe_points) seeds.push_back({{p[0]}, {p[1]}});
  const auto low = check_lemma_bounds<1>(0.5, bracket_power_potential<1>(1.0, 1.0), cfg.t, seeds, cfg.lambda, cfg.a);
  // A seed at the origin has x(0) -> 0 as lambda grows, so only sup |x(s)| is compared.
  o.detail << "theta 0.5 sup |x(s)| spread " << low.x_max_spread;
  o.require(low.x_max_spread <= kLemmaStabilityTolerance, "theta 0.5 position bound");
}

void preset_gate(Outcome& o, const std::string& preset, const std::vector<std::pair<std::string, std::size_t>>& checks,
                 double max_seconds = 0.0) {
  const Stopwatch clock;
  const auto rep = run_preset(preset);
  const double secs = clock.seconds();
  for (const auto& [prefix, minimum] : checks) require_verdicts(o, rep, prefix, minimum);
  o.detail << preset << " exit " << rep.exit_code() << ", " << secs << " s";
  o.require(rep.exit_code() == 0, "preset exit code");
  if (max_seconds > 0.0) o.require(secs < max_seconds, "runtime");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"wave packet transform oracle equivalence", wpt_equivalence},
      {"wave packet transform norm identity", wpt_norm_identity},
      {"delta scaling law", delta_scaling},
      {"propagator unitarity, order and free path", propagator_checks},
      {"Hamilton flow energy, closed form, order and Picard", flow_checks},
      {"lambda-uniform flow bounds", lemma_checks},
      {"theta = 1 transport",
       [](Outcome& o) {
         preset_gate(o, "theta_eq1_transport", {{"classification", 8}, {"slope_separation", 2}}, 300.0);
       }},
      {"theta < 1 invariance",
       [](Outcome& o) { preset_gate(o, "theta_lt1_invariance", {{"classification", 3}, {"slope_separation", 1}}); }},
      {"flowed versus static consistency, 1 < theta < 2",
       [](Outcome& o) { preset_gate(o, "theta_mid_potential", {{"flowed_vs_static", 4}}); }},
      {"free flow equivalence",
       [](Outcome& o) { preset_gate(o, "free_flow_equivalence", {{"full_vs_free_slope", 9}}); }},
      {"transport residual",
       [](Outcome& o) {
         preset_gate(o, "transport_plane_wave", {{"plane_wave_residual", 1}, {"stencil_halving", 1}});
         o.detail << "; ";
         preset_gate(o, "transport_residual", {{"rho_decreases_with_lambda", 1}});
       }},
      {"static probe versus Fourier cone oracle",
       [](Outcome& o) { preset_gate(o, "static_wf_suite", {{"oracle_agreement", 24}}); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "error: " << e.what();
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " | "
              << o.detail.str() << std::endl;
  }
  std::cout << criteria.size() - failures << "/" << criteria.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
