#pragma once

// Gamma, reciprocal gamma and principal-branch complex powers.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "vofrac/errors.hpp"

namespace vofrac {

using cplx = std::complex<double>;

/// Distance below which an argument counts as a non-positive integer.
inline constexpr double kPoleTolerance = 1e-12;

struct GammaResult {
  double value = 0.0;
  bool at_pole = false;
};

namespace detail {

// Godfrey's coefficients, g = 607/128, 15 terms.
inline constexpr double kLanczosG = 607.0 / 128.0;
inline constexpr std::array<double, 15> kLanczosCoef = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4, .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,  -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4, .36899182659531622704e-5};

inline bool near_pole(double x) {
  return x <= kPoleTolerance && std::abs(x - std::round(x)) <= kPoleTolerance;
}

// sin(pi x) with exact zeros at the integers.
inline double sinpi(double x) {
  double r = x - 2.0 * std::round(0.5 * x);  // r in [-1, 1]
  if (r > 0.5) r = 1.0 - r;
  else if (r < -0.5) r = -1.0 - r;
  return std::sin(std::numbers::pi * r);
}

// Gamma for x >= 0.5. Positive integers up to 171 go through the factorial product.
inline double gamma_positive(double x) {
  if (x == std::floor(x) && x <= 171.0) {
    double f = 1.0;
    for (int k = 2; k < static_cast<int>(x); ++k) f *= k;
    return f;
  }
  if (x > 171.7) return std::numeric_limits<double>::infinity();
  const double z = x - 1.0;
  double series = kLanczosCoef[0];
  for (std::size_t k = 1; k < kLanczosCoef.size(); ++k) series += kLanczosCoef[k] / (z + static_cast<double>(k));
  const double t = z + kLanczosG + 0.5;
  // Split the power so t^(z+1/2) does not overflow before exp(-t) pulls it back.
  const double half = std::pow(t, 0.5 * (z + 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * half * (half * std::exp(-t)) * series;
}

}  // namespace detail

/// Gamma function. Throws PoleError within kPoleTolerance of 0, -1, -2, ...
inline double gamma(double x) {
  if (std::isnan(x)) return x;
  if (detail::near_pole(x)) throw PoleError("gamma: pole at x = " + std::to_string(x));
  if (x < 0.5) return std::numbers::pi / (detail::sinpi(x) * detail::gamma_positive(1.0 - x));
  return detail::gamma_positive(x);
}

/// 1/Gamma(x); entire, exactly zero at the poles of Gamma.
inline double rgamma(double x) {
  if (std::isnan(x)) return x;
  if (detail::near_pole(x)) return 0.0;
  if (x < 0.5) return detail::sinpi(x) * detail::gamma_positive(1.0 - x) / std::numbers::pi;
  return 1.0 / detail::gamma_positive(x);
}

inline GammaResult gamma_result(double x) {
  if (detail::near_pole(x)) return {std::numeric_limits<double>::infinity(), true};
  return {gamma(x), false};
}

/// Principal-branch power s^q = exp(q (ln|s| + i arg s)), arg in (-pi, pi].
inline cplx cpow(cplx s, double q) {
  if (s == cplx(0.0, 0.0)) {
    if (q > 0.0) return {0.0, 0.0};
    throw DomainError("cpow: zero base with non-positive exponent");
  }
  if (s.imag() == 0.0 && s.real() > 0.0) return {std::pow(s.real(), q), 0.0};
  return std::exp(q * cplx(std::log(std::abs(s)), std::arg(s)));
}

}  // namespace vofrac
