#pragma once

// Variable-order fractional integrals and psi-Caputo derivatives taken with
// respect to a scale function phi. The order xi(sigma, t) is frozen at the
// outer point t while the kernel is integrated in s.

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "vofrac/errors.hpp"
#include "vofrac/quad.hpp"
#include "vofrac/specialfn.hpp"

namespace vofrac {

/// Working interval T = [a, b] with 0 <= a < b < inf.
struct Interval {
  double a = 0.0;
  double b = 1.0;

  Interval() = default;
  Interval(double lo, double hi) : a(lo), b(hi) {
    if (!(0.0 <= a && a < b && std::isfinite(b))) {
      throw ValidationError("Interval: requires 0 <= a < b < inf, got [" + std::to_string(a) + ", " +
                            std::to_string(b) + "]");
    }
  }

  bool contains(double t) const { return a <= t && t <= b; }
};

/// A real function of t carrying the frozen parameter sigma.
class ScalarFunction {
 public:
  using Fn = std::function<double(double)>;
  using TransformFn = std::function<cplx(cplx)>;

  /// |f(t)| <= constant * exp(rate * t).
  struct GrowthBound {
    double constant = 1.0;
    double rate = 0.0;
  };

  ScalarFunction() = default;
  explicit ScalarFunction(Fn eval, std::optional<Fn> deriv = std::nullopt, double sigma = 0.0)
      : eval_(std::move(eval)), deriv_(std::move(deriv)), sigma_(sigma) {}

  double operator()(double t) const { return eval_(t); }

  /// Analytic derivative when available, otherwise a central difference with
  /// step max(1e-6, 1e-6 |t|).
  double derivative(double t) const {
    if (deriv_) return (*deriv_)(t);
    const double h = std::max(1e-6, 1e-6 * std::abs(t));
    return (eval_(t + h) - eval_(t - h)) / (2.0 * h);
  }

  bool has_analytic_derivative() const { return deriv_.has_value(); }
  double sigma() const { return sigma_; }

  const std::optional<GrowthBound>& growth_bound() const { return growth_; }
  /// Exponent p with f(t) = t^p * (smooth) near t = 0, when known.
  const std::optional<double>& origin_power() const { return origin_power_; }
  /// Upper end of the support; the function must not be sampled beyond it.
  double horizon() const { return horizon_; }
  const std::optional<TransformFn>& closed_form_transform() const { return transform_; }

  ScalarFunction& with_sigma(double s) { sigma_ = s; return *this; }
  ScalarFunction& with_growth(GrowthBound g) { growth_ = g; return *this; }
  ScalarFunction& with_origin_power(double p) { origin_power_ = p; return *this; }
  ScalarFunction& with_horizon(double h) { horizon_ = h; return *this; }
  ScalarFunction& with_transform(TransformFn f) { transform_ = std::move(f); return *this; }

  /// Spot-check the growth bound on the 50-point grid t = lo, ..., hi.
  void check_growth_bound(double lo = 1.0, double hi = 50.0) const {
    if (!growth_) throw ValidationError("ScalarFunction: no growth bound declared");
    for (int k = 0; k < 50; ++k) {
      const double t = lo + (hi - lo) * k / 49.0;
      if (t > horizon_) break;
      double v = 0.0;
      try {
        v = std::abs(eval_(t));
      } catch (const NonConvergence& e) {
        v = std::abs(e.partial().value);
      }
      const double cap = growth_->constant * std::exp(growth_->rate * t);
      if (!(v <= cap * (1.0 + 1e-12))) {
        throw ValidationError("ScalarFunction: growth bound violated at t = " + std::to_string(t));
      }
    }
  }

  /// The derivative as a function in its own right (inherits growth and horizon).
  ScalarFunction derivative_function() const {
    ScalarFunction d([self = *this](double t) { return self.derivative(t); }, std::nullopt, sigma_);
    d.growth_ = growth_;
    d.horizon_ = horizon_;
    if (origin_power_ && *origin_power_ != std::floor(*origin_power_)) d.origin_power_ = *origin_power_ - 1.0;
    return d;
  }

 private:
  Fn eval_ = [](double) { return 0.0; };
  std::optional<Fn> deriv_;
  double sigma_ = 0.0;
  std::optional<GrowthBound> growth_;
  std::optional<double> origin_power_;
  double horizon_ = std::numeric_limits<double>::infinity();
  std::optional<TransformFn> transform_;
};

/// The order xi(sigma, t); every value handed out lies in (0, 1).
class OrderFunction {
 public:
  using Fn = std::function<double(double, double)>;

  OrderFunction() = default;
  explicit OrderFunction(Fn eval, std::optional<double> constant = std::nullopt)
      : eval_(std::move(eval)), constant_(constant) {}

  static OrderFunction constant(double xi) {
    check(xi, 0.0, 0.0);
    return OrderFunction([xi](double, double) { return xi; }, xi);
  }

  double operator()(double sigma, double t) const {
    const double v = eval_(sigma, t);
    check(v, sigma, t);
    return v;
  }

  bool is_constant() const { return constant_.has_value(); }

 private:
  static void check(double v, double sigma, double t) {
    if (!(v > 0.0 && v < 1.0)) {
      throw OrderRangeError("order xi(sigma,t) = " + std::to_string(v) + " at sigma = " + std::to_string(sigma) +
                            ", t = " + std::to_string(t) + " violates 0<xi(sigma,t)<1");
    }
  }

  Fn eval_ = [](double, double) { return 0.5; };
  std::optional<double> constant_;
};

/// Monotone scale phi with nonvanishing derivative.
class ScaleFunction {
 public:
  using Fn = std::function<double(double)>;

  /// phi(t) = coef * t^exponent.
  struct PowerForm {
    double coef = 1.0;
    double exponent = 1.0;
  };

  ScaleFunction() { *this = identity(); }
  ScaleFunction(Fn phi, Fn dphi) : phi_(std::move(phi)), dphi_(std::move(dphi)) {}
  ScaleFunction(Fn phi, Fn dphi, const Interval& working) : ScaleFunction(std::move(phi), std::move(dphi)) {
    validate(working);
  }

  static ScaleFunction identity() {
    ScaleFunction s([](double t) { return t; }, [](double) { return 1.0; });
    s.power_ = PowerForm{1.0, 1.0};
    s.identity_ = true;
    return s;
  }

  static ScaleFunction power(double coef, double exponent) {
    if (!(coef > 0.0 && exponent > 0.0)) throw ValidationError("ScaleFunction::power: coef and exponent must be > 0");
    ScaleFunction s([=](double t) { return coef * std::pow(t, exponent); },
                    [=](double t) { return coef * exponent * std::pow(t, exponent - 1.0); });
    s.power_ = PowerForm{coef, exponent};
    s.identity_ = coef == 1.0 && exponent == 1.0;
    return s;
  }

  double operator()(double t) const { return phi_(t); }
  double derivative(double t) const { return dphi_(t); }
  const std::optional<PowerForm>& power_form() const { return power_; }
  bool is_identity() const { return identity_; }

  /// Checks phi' != 0 and strict monotonicity at the 100 cell midpoints of
  /// the interval.
  void validate(const Interval& iv) const {
    constexpr int n = 100;
    double prev = 0.0;
    int direction = 0;
    for (int k = 0; k < n; ++k) {
      const double t = iv.a + (iv.b - iv.a) * (k + 0.5) / n;
      const double d = dphi_(t);
      if (!(d != 0.0) || !std::isfinite(d)) {
        throw ValidationError("ScaleFunction: phi'(t) = 0 at t = " + std::to_string(t) + " (requires phi^(1)(t) != 0)");
      }
      const double v = phi_(t);
      if (k > 0) {
        const int dir = v > prev ? 1 : (v < prev ? -1 : 0);
        if (dir == 0 || (direction != 0 && dir != direction)) {
          throw ValidationError("ScaleFunction: phi is not strictly monotone near t = " + std::to_string(t));
        }
        direction = dir;
      }
      prev = v;
    }
  }

  /// (phi(t) - phi(s)) / (t - s), falling back to phi' at the midpoint when
  /// the two points are too close for the quotient.
  double slope(double t, double s) const {
    if (identity_) return 1.0;
    const double h = t - s;
    if (std::abs(h) <= 1e-9 * std::max(1.0, std::abs(t))) return dphi_(0.5 * (t + s));
    return (phi_(t) - phi_(s)) / h;
  }

 private:
  Fn phi_;
  Fn dphi_;
  std::optional<PowerForm> power_;
  bool identity_ = false;
};

namespace detail {

inline void require_in(const Interval& iv, double t, const char* who) {
  if (!iv.contains(t)) {
    throw DomainError(std::string(who) + ": t = " + std::to_string(t) + " outside [" + std::to_string(iv.a) + ", " +
                      std::to_string(iv.b) + "]");
  }
}

// The kernels need phi(t) - phi(s) > 0 for s < t.
inline void require_increasing(const ScaleFunction& phi, double lo, double hi, const char* who) {
  if (!(phi(hi) > phi(lo))) throw DomainError(std::string(who) + ": scale function must be increasing");
}

inline double checked(const QuadResult& r, double factor, const char* who) {
  QuadResult scaled = r;
  scaled.value *= factor;
  scaled.error_estimate *= std::abs(factor);
  return require_converged(scaled, who);
}

}  // namespace detail

/// Left fractional integral
///   (1/Gamma(xi)) int_a^t phi'(s) (phi(t) - phi(s))^(xi - 1) psi(s) ds,  xi = xi(sigma, t).
/// The kernel is split as (t - s)^(xi - 1) * slope^(xi - 1) so the Jacobi
/// weight carries the singular factor exactly.
inline double vo_integral_left(const ScalarFunction& psi, const OrderFunction& xi, const ScaleFunction& phi,
                               const Interval& iv, double t, const QuadConfig& cfg = {}) {
  detail::require_in(iv, t, "vo_integral_left");
  const double order = xi(psi.sigma(), t);
  if (t == iv.a) return 0.0;
  detail::require_increasing(phi, iv.a, t, "vo_integral_left");
  auto g = [&](double s) { return phi.derivative(s) * std::pow(phi.slope(t, s), order - 1.0) * psi(s); };
  return detail::checked(integrate_endpoint_singular(g, iv.a, t, order - 1.0, true, cfg), rgamma(order),
                         "vo_integral_left");
}

/// Right fractional integral over [t, b] with kernel (phi(s) - phi(t))^(xi - 1).
inline double vo_integral_right(const ScalarFunction& psi, const OrderFunction& xi, const ScaleFunction& phi,
                                const Interval& iv, double t, const QuadConfig& cfg = {}) {
  detail::require_in(iv, t, "vo_integral_right");
  const double order = xi(psi.sigma(), t);
  if (t == iv.b) return 0.0;
  detail::require_increasing(phi, t, iv.b, "vo_integral_right");
  auto g = [&](double s) { return phi.derivative(s) * std::pow(phi.slope(s, t), order - 1.0) * psi(s); };
  return detail::checked(integrate_endpoint_singular(g, t, iv.b, order - 1.0, false, cfg), rgamma(order),
                         "vo_integral_right");
}

/// Left psi-Caputo derivative exactly as defined:
///   (1/Gamma(1 - xi)) int_a^t (phi(t) - phi(s))^(-xi) psi'(s) ds.
/// There is no phi'(s) factor under the integral.
inline double vo_caputo_left(const ScalarFunction& psi, const OrderFunction& xi, const ScaleFunction& phi,
                             const Interval& iv, double t, const QuadConfig& cfg = {}) {
  detail::require_in(iv, t, "vo_caputo_left");
  const double order = xi(psi.sigma(), t);
  if (t == iv.a) return 0.0;
  detail::require_increasing(phi, iv.a, t, "vo_caputo_left");
  auto g = [&](double s) { return std::pow(phi.slope(t, s), -order) * psi.derivative(s); };
  return detail::checked(integrate_endpoint_singular(g, iv.a, t, -order, true, cfg), rgamma(1.0 - order),
                         "vo_caputo_left");
}

/// Right psi-Caputo derivative, -(1/Gamma(1 - xi)) int_t^b (phi(s) - phi(t))^(-xi) psi'(s) ds.
inline double vo_caputo_right(const ScalarFunction& psi, const OrderFunction& xi, const ScaleFunction& phi,
                              const Interval& iv, double t, const QuadConfig& cfg = {}) {
  detail::require_in(iv, t, "vo_caputo_right");
  const double order = xi(psi.sigma(), t);
  if (t == iv.b) return 0.0;
  detail::require_increasing(phi, t, iv.b, "vo_caputo_right");
  auto g = [&](double s) { return std::pow(phi.slope(s, t), -order) * psi.derivative(s); };
  return detail::checked(integrate_endpoint_singular(g, t, iv.b, -order, false, cfg), -rgamma(1.0 - order),
                         "vo_caputo_right");
}

/// Classical left Caputo derivative of constant order, identity scale.
inline double caputo_const_left(const ScalarFunction& psi, double xi_const, const Interval& iv, double t,
                                const QuadConfig& cfg = {}) {
  if (!(xi_const > 0.0 && xi_const < 1.0)) {
    throw OrderRangeError("caputo_const_left: order " + std::to_string(xi_const) + " violates 0<xi<1");
  }
  detail::require_in(iv, t, "caputo_const_left");
  if (t == iv.a) return 0.0;
  auto g = [&](double s) { return psi.derivative(s); };
  return detail::checked(integrate_endpoint_singular(g, iv.a, t, -xi_const, true, cfg), rgamma(1.0 - xi_const),
                         "caputo_const_left");
}

}  // namespace vofrac
