#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wfl/core.hpp"

namespace wfl {

template <std::size_t Dim>
using MultiIndex = std::array<int, Dim>;

template <std::size_t Dim>
int order(const MultiIndex<Dim>& alpha) {
  int s = 0;
  for (int a : alpha) s += a;
  return s;
}

/// Real potential V with gradient, analytic partial derivatives up to
/// max_order, and the growth exponent nu it is claimed to satisfy:
/// |d^alpha V(x)| <= C_alpha <x>^{nu - |alpha|}.
template <std::size_t Dim>
struct PotentialSpec {
  std::string label;
  std::string kind;  // builtin kind, or "custom"
  std::vector<double> params;
  double nu = 0.0;
  int max_order = 0;
  std::function<double(const Vec<Dim>&)> value;
  std::function<Vec<Dim>(const Vec<Dim>&)> gradient;
  std::function<double(const Vec<Dim>&, const MultiIndex<Dim>&)> derivative;

  bool is_zero() const { return kind == "zero"; }
};

namespace detail {

// Truncated polynomial in Dim variables, total degree <= deg, dense storage.
template <std::size_t Dim>
class TaylorPoly {
 public:
  explicit TaylorPoly(int deg) : deg_(deg), c_(static_cast<std::size_t>(std::pow(deg + 1, Dim)), 0.0) {}

  double& at(const MultiIndex<Dim>& a) { return c_[index(a)]; }
  double at(const MultiIndex<Dim>& a) const { return c_[index(a)]; }
  int degree() const { return deg_; }

  TaylorPoly operator*(const TaylorPoly& o) const {
    TaylorPoly r(deg_);
    for_each([&](const MultiIndex<Dim>& a) {
      const double ca = at(a);
      if (ca == 0.0) return;
      o.for_each([&](const MultiIndex<Dim>& b) {
        if (order<Dim>(a) + order<Dim>(b) > deg_) return;
        MultiIndex<Dim> s{};
        for (std::size_t i = 0; i < Dim; ++i) s[i] = a[i] + b[i];
        r.at(s) += ca * o.at(b);
      });
    });
    return r;
  }

  template <class F>
  void for_each(F&& f) const {
    MultiIndex<Dim> a{};
    if constexpr (Dim == 1) {
      for (a[0] = 0; a[0] <= deg_; ++a[0]) f(a);
    } else {
      for (a[0] = 0; a[0] <= deg_; ++a[0])
        for (a[1] = 0; a[0] + a[1] <= deg_; ++a[1]) f(a);
    }
  }

 private:
  std::size_t index(const MultiIndex<Dim>& a) const {
    std::size_t k = 0;
    for (std::size_t i = 0; i < Dim; ++i) k = k * static_cast<std::size_t>(deg_ + 1) + static_cast<std::size_t>(a[i]);
    return k;
  }

  int deg_;
  std::vector<double> c_;
};

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// d^alpha of G(|x|^2) at x0, given the s-derivatives G^{(k)}(s0), k <= |alpha|.
// Expands s(x0 + h) - s0 = sum 2 x0_i h_i + h_i^2 and composes the Taylor
// series of G with it; the multi-index coefficient times alpha! is the answer.
template <std::size_t Dim>
double radial_derivative(const Vec<Dim>& x0, const MultiIndex<Dim>& alpha,
                         const std::vector<double>& g_derivs) {
  const int deg = order<Dim>(alpha);
  TaylorPoly<Dim> delta(deg);
  for (std::size_t i = 0; i < Dim; ++i) {
    MultiIndex<Dim> e{};
    e[i] = 1;
    if (deg >= 1) delta.at(e) += 2.0 * x0[i];
    e[i] = 2;
    if (deg >= 2) delta.at(e) += 1.0;
  }
  TaylorPoly<Dim> power(deg);
  power.at(MultiIndex<Dim>{}) = 1.0;
  double coeff = 0.0;
  for (int k = 0; k <= deg; ++k) {
    coeff += g_derivs[static_cast<std::size_t>(k)] / factorial(k) * power.at(alpha);
    if (k < deg) power = power * delta;
  }
  double alpha_fact = 1.0;
  for (int a : alpha) alpha_fact *= factorial(a);
  return coeff * alpha_fact;
}

}  // namespace detail

inline constexpr int kPotentialMaxOrder = 6;

/// V = 0.
template <std::size_t Dim>
PotentialSpec<Dim> zero_potential() {
  PotentialSpec<Dim> p;
  p.label = "zero";
  p.kind = "zero";
  p.nu = 0.0;
  p.max_order = kPotentialMaxOrder;
  p.value = [](const Vec<Dim>&) { return 0.0; };
  p.gradient = [](const Vec<Dim>&) { return Vec<Dim>{}; };
  p.derivative = [](const Vec<Dim>&, const MultiIndex<Dim>&) { return 0.0; };
  return p;
}

/// Constant potential V = c; used to check that a global phase commutes.
template <std::size_t Dim>
PotentialSpec<Dim> constant_potential(double c) {
  PotentialSpec<Dim> p;
  p.label = "constant(" + std::to_string(c) + ")";
  p.kind = "constant";
  p.params = {c};
  p.nu = 0.0;
  p.max_order = kPotentialMaxOrder;
  p.value = [c](const Vec<Dim>&) { return c; };
  p.gradient = [](const Vec<Dim>&) { return Vec<Dim>{}; };
  p.derivative = [c](const Vec<Dim>&, const MultiIndex<Dim>& a) { return order<Dim>(a) == 0 ? c : 0.0; };
  return p;
}

/// V(x) = A exp(-|x|^2 / (2 w^2)); satisfies the growth bound with nu = 0.
template <std::size_t Dim>
PotentialSpec<Dim> bump_potential(double amplitude, double width) {
  if (!(width > 0.0)) throw InvalidArgument("bump width must be positive");
  PotentialSpec<Dim> p;
  std::ostringstream os;
  os << "bump(" << amplitude << "," << width << ")";
  p.label = os.str();
  p.kind = "bump";
  p.params = {amplitude, width};
  p.nu = 0.0;
  p.max_order = kPotentialMaxOrder;
  const double c = -1.0 / (2.0 * width * width);
  p.value = [=](const Vec<Dim>& x) { return amplitude * std::exp(c * dot<Dim>(x, x)); };
  p.gradient = [=](const Vec<Dim>& x) {
    const double g = 2.0 * c * amplitude * std::exp(c * dot<Dim>(x, x));
    return g * x;
  };
  p.derivative = [=](const Vec<Dim>& x, const MultiIndex<Dim>& alpha) {
    const double s0 = dot<Dim>(x, x);
    const int deg = order<Dim>(alpha);
    std::vector<double> g(static_cast<std::size_t>(deg + 1));
    const double base = amplitude * std::exp(c * s0);
    for (int k = 0; k <= deg; ++k) g[static_cast<std::size_t>(k)] = base * std::pow(c, k);
    return detail::radial_derivative<Dim>(x, alpha, g);
  };
  return p;
}

/// V(x) = c <x>^nu = c (1 + |x|^2)^{nu/2}.
template <std::size_t Dim>
PotentialSpec<Dim> bracket_power_potential(double coefficient, double nu) {
  PotentialSpec<Dim> p;
  std::ostringstream os;
  os << "bracket_power(" << coefficient << "," << nu << ")";
  p.label = os.str();
  p.kind = "bracket_power";
  p.params = {coefficient, nu};
  p.nu = nu;
  p.max_order = kPotentialMaxOrder;
  const double half = nu / 2.0;
  p.value = [=](const Vec<Dim>& x) { return coefficient * std::pow(1.0 + dot<Dim>(x, x), half); };
  p.gradient = [=](const Vec<Dim>& x) {
    const double g = 2.0 * half * coefficient * std::pow(1.0 + dot<Dim>(x, x), half - 1.0);
    return g * x;
  };
  p.derivative = [=](const Vec<Dim>& x, const MultiIndex<Dim>& alpha) {
    const double q = 1.0 + dot<Dim>(x, x);
    const int deg = order<Dim>(alpha);
    std::vector<double> g(static_cast<std::size_t>(deg + 1));
    double falling = 1.0;
    for (int k = 0; k <= deg; ++k) {
      g[static_cast<std::size_t>(k)] = coefficient * falling * std::pow(q, half - k);
      falling *= (half - k);
    }
    return detail::radial_derivative<Dim>(x, alpha, g);
  };
  return p;
}

/// Build a builtin potential by name: zero | bump(A, w) | bracket_power(c, nu).
template <std::size_t Dim>
PotentialSpec<Dim> builtin_potential(const std::string& kind, const std::vector<double>& params) {
  auto need = [&](std::size_t n) {
    if (params.size() < n) throw InvalidArgument("potential '" + kind + "' needs " + std::to_string(n) + " parameters");
  };
  if (kind == "zero") return zero_potential<Dim>();
  if (kind == "bump") {
    need(2);
    return bump_potential<Dim>(params[0], params[1]);
  }
  if (kind == "bracket_power") {
    need(2);
    return bracket_power_potential<Dim>(params[0], params[1]);
  }
  if (kind == "constant") {
    need(1);
    return constant_potential<Dim>(params[0]);
  }
  throw InvalidArgument("unknown potential kind '" + kind + "'");
}

/// All multi-indices with |alpha| <= max_order, graded by order.
template <std::size_t Dim>
std::vector<MultiIndex<Dim>> multi_indices(int max_order) {
  std::vector<MultiIndex<Dim>> out;
  for (int n = 0; n <= max_order; ++n) {
    if constexpr (Dim == 1) {
      out.push_back({n});
    } else {
      for (int i = n; i >= 0; --i) out.push_back({i, n - i});
    }
  }
  return out;
}

struct GrowthEntry {
  std::vector<int> alpha;
  double c_hat = 0.0;
  bool bound_ok = false;
};

struct GrowthReport {
  std::string label;
  double theta = 0.0;
  double nu = 0.0;
  double box = 0.0;
  int orders = 0;
  std::optional<double> nu_limit;  // theta/(theta-1) when 1 < theta < 2
  bool nu_ok = false;
  bool pass = false;
  std::vector<GrowthEntry> entries;
  std::vector<std::string> notes;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["label"] = label;
    j["theta"] = theta;
    j["nu"] = nu;
    j["box"] = box;
    j["orders"] = orders;
    j["nu_limit"] = nu_limit ? nlohmann::json(*nu_limit) : nlohmann::json(nullptr);
    j["nu_ok"] = nu_ok;
    j["pass"] = pass;
    j["notes"] = notes;
    auto& arr = j["entries"] = nlohmann::json::array();
    for (const auto& e : entries) arr.push_back({{"alpha", e.alpha}, {"C_hat", e.c_hat}, {"bound_ok", e.bound_ok}});
    return j;
  }
};

/// Estimate C_alpha = max |d^alpha V(x)| / <x>^{nu-|alpha|} over an
/// equispaced lattice on [-box, box]^Dim and check nu < theta/(theta-1)
/// when 1 < theta < 2. For theta <= 1 the growth condition does not apply.
template <std::size_t Dim>
GrowthReport check_growth_assumption(const PotentialSpec<Dim>& pot, double theta, double box, int orders,
                                     std::size_t lattice_points = Dim == 1 ? 4097 : 257) {
  if (orders > pot.max_order) throw InvalidArgument("requested derivative order exceeds the potential's max_order");
  if (!(box > 0.0)) throw InvalidArgument("box must be positive");
  if (lattice_points < 2) throw InvalidArgument("lattice needs at least two points per axis");
  GrowthReport rep;
  rep.label = pot.label;
  rep.theta = theta;
  rep.nu = pot.nu;
  rep.box = box;
  rep.orders = orders;

  const double step = 2.0 * box / static_cast<double>(lattice_points - 1);
  std::size_t total = lattice_points;
  if constexpr (Dim == 2) total *= lattice_points;
  bool all_ok = true;
  for (const auto& alpha : multi_indices<Dim>(orders)) {
    double c_hat = 0.0;
    bool ok = true;
    const int n = order<Dim>(alpha);
    for (std::size_t flat = 0; flat < total; ++flat) {
      Vec<Dim> x{};
      std::size_t r = flat;
      for (int a = Dim - 1; a >= 0; --a) {
        x[a] = -box + static_cast<double>(r % lattice_points) * step;
        r /= lattice_points;
      }
      const double d = std::abs(pot.derivative(x, alpha));
      const double ratio = d / std::pow(bracket<Dim>(x), pot.nu - n);
      if (!std::isfinite(ratio)) {
        ok = false;
        c_hat = std::numeric_limits<double>::infinity();
        break;
      }
      c_hat = std::max(c_hat, ratio);
    }
    all_ok = all_ok && ok;
    rep.entries.push_back({std::vector<int>(alpha.begin(), alpha.end()), c_hat, ok});
  }

  if (theta > 1.0 && theta < 2.0) {
    rep.nu_limit = theta / (theta - 1.0);
    rep.nu_ok = pot.nu < *rep.nu_limit;
    if (!rep.nu_ok) {
      std::ostringstream os;
      os << "growth exponent nu = " << pot.nu << " violates nu < theta/(theta-1) = " << *rep.nu_limit;
      rep.notes.push_back(os.str());
    }
  } else {
    rep.nu_ok = true;
    rep.notes.push_back("growth condition is imposed only for 1 < theta < 2; vacuous here");
  }
  {
    std::ostringstream os;
    os << "derivative bounds verified for |alpha| <= " << orders
       << " only; higher orders are assumed, not checked";
    rep.notes.push_back(os.str());
  }
  rep.pass = all_ok && rep.nu_ok;
  return rep;
}

struct BInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double b) const { return b > lo && b < hi; }
};

struct ShortRangeResult {
  std::optional<BInterval> interval;  // empty when rejected
  std::string reason;
  bool admissible() const { return interval.has_value(); }
};

/// Admissible window for b under which the potential-free flow may replace
/// the full flow: ((theta-1)(nu-1), (2-theta)/2) when nu < theta/(2(theta-1)),
/// and (0, (2-theta)/2) for theta <= 1. The lower end never drops below 0.
inline ShortRangeResult check_shortrange(double nu, double theta) {
  if (!(theta > 0.0 && theta < 2.0)) throw InvalidArgument("theta must lie in (0, 2)");
  const double hi = (2.0 - theta) / 2.0;
  if (theta <= 1.0) return {BInterval{0.0, hi}, "theta <= 1: no decay condition on V"};
  const double limit = theta / (2.0 * (theta - 1.0));
  if (!(nu < limit)) {
    std::ostringstream os;
    os << "nu = " << nu << " is not below theta/(2(theta-1)) = " << limit;
    return {std::nullopt, os.str()};
  }
  const double lo = std::max(0.0, (theta - 1.0) * (nu - 1.0));
  if (!(lo < hi)) {
    std::ostringstream os;
    os << "empty b window (" << lo << ", " << hi << ")";
    return {std::nullopt, os.str()};
  }
  return {BInterval{lo, hi}, "short-range condition holds"};
}

template <std::size_t Dim>
ShortRangeResult check_shortrange(const PotentialSpec<Dim>& pot, double theta) {
  if (pot.is_zero()) return check_shortrange(-std::numeric_limits<double>::infinity(), theta);
  return check_shortrange(pot.nu, theta);
}

/// Largest relative mismatch between the analytic gradient and central
/// differences (step 1e-5) over a 33^Dim lattice plus random points.
template <std::size_t Dim>
double gradient_consistency(const PotentialSpec<Dim>& pot, double box, std::size_t random_points = 100,
                            unsigned seed = 7) {
  const double step = 1e-5;
  double worst = 0.0;
  auto check = [&](const Vec<Dim>& x) {
    const Vec<Dim> g = pot.gradient(x);
    double scale = 0.0;
    for (std::size_t a = 0; a < Dim; ++a) scale = std::max(scale, std::abs(g[a]));
    for (std::size_t a = 0; a < Dim; ++a) {
      Vec<Dim> xp = x, xm = x;
      xp[a] += step;
      xm[a] -= step;
      const double fd = (pot.value(xp) - pot.value(xm)) / (2.0 * step);
      const double denom = std::max({scale, std::abs(pot.value(x)), 1e-300});
      worst = std::max(worst, std::abs(fd - g[a]) / denom);
    }
  };
  constexpr std::size_t n = 33;
  std::size_t total = n;
  if constexpr (Dim == 2) total *= n;
  for (std::size_t flat = 0; flat < total; ++flat) {
    Vec<Dim> x{};
    std::size_t r = flat;
    for (int a = Dim - 1; a >= 0; --a) {
      x[a] = -box + 2.0 * box * static_cast<double>(r % n) / static_cast<double>(n - 1);
      r /= n;
    }
    check(x);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-box, box);
  for (std::size_t i = 0; i < random_points; ++i) {
    Vec<Dim> x{};
    for (auto& v : x) v = uni(rng);
    check(x);
  }
  return worst;
}

}  // namespace wfl
