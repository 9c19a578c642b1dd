#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace wfl {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

/// A requested frequency lies outside the grid's resolvable band.
class OutOfBand : public Error {
 public:
  OutOfBand(const std::string& msg, std::size_t minimal_points)
      : Error(msg), minimal_points_(minimal_points) {}

  /// Smallest power-of-two point count per axis that would resolve the request.
  std::size_t minimal_points() const noexcept { return minimal_points_; }

 private:
  std::size_t minimal_points_;
};

/// A Hamiltonian trajectory approached xi = 0.
class MomentumCollapse : public Error {
 public:
  MomentumCollapse(const std::string& msg, double s, double momentum)
      : Error(msg), s_(s), momentum_(momentum) {}
  double s() const noexcept { return s_; }
  double momentum() const noexcept { return momentum_; }

 private:
  double s_;
  double momentum_;
};

template <std::size_t Dim>
using Vec = std::array<double, Dim>;

template <std::size_t Dim>
constexpr double dot(const Vec<Dim>& a, const Vec<Dim>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < Dim; ++i) s += a[i] * b[i];
  return s;
}

template <std::size_t Dim>
double norm(const Vec<Dim>& a) {
  return std::sqrt(dot<Dim>(a, a));
}

template <std::size_t Dim>
constexpr Vec<Dim> operator+(const Vec<Dim>& a, const Vec<Dim>& b) {
  Vec<Dim> r{};
  for (std::size_t i = 0; i < Dim; ++i) r[i] = a[i] + b[i];
  return r;
}

template <std::size_t Dim>
constexpr Vec<Dim> operator-(const Vec<Dim>& a, const Vec<Dim>& b) {
  Vec<Dim> r{};
  for (std::size_t i = 0; i < Dim; ++i) r[i] = a[i] - b[i];
  return r;
}

template <std::size_t Dim>
constexpr Vec<Dim> operator*(double s, const Vec<Dim>& a) {
  Vec<Dim> r{};
  for (std::size_t i = 0; i < Dim; ++i) r[i] = s * a[i];
  return r;
}

/// Japanese bracket <x> = (1 + |x|^2)^{1/2}.
template <std::size_t Dim>
double bracket(const Vec<Dim>& x) {
  return std::sqrt(1.0 + dot<Dim>(x, x));
}

template <std::size_t Dim>
bool all_finite(const Vec<Dim>& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(double x) {
  std::size_t n = 1;
  while (static_cast<double>(n) < x) n <<= 1;
  return n;
}

}  // namespace wfl
