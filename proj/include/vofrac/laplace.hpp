#pragma once

// Laplace transform engine: classical forward transform by quadrature,
// analytic continuation of the transform of t^mu, the frozen-order symbol
// s^xi(sigma,t'), Hadamard finite-part transforms of t^p h(t) for p <= -1,
// and Fixed-Talbot numerical inversion.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "vofrac/errors.hpp"
#include "vofrac/quad.hpp"
#include "vofrac/specialfn.hpp"
#include "vofrac/voperators.hpp"

namespace vofrac {

/// Finite set of sample points s with Re(s) >= abscissa > 0.
class ComplexGrid {
 public:
  ComplexGrid() : ComplexGrid(default_grid()) {}
  ComplexGrid(std::vector<cplx> points, double abscissa) : points_(std::move(points)), abscissa_(abscissa) {
    if (!(abscissa_ > 0.0)) throw ValidationError("ComplexGrid: abscissa must be > 0 (Re(s) = c > 0)");
    if (points_.empty()) throw ValidationError("ComplexGrid: no points");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!(points_[i].real() >= abscissa_)) {
        throw ValidationError("ComplexGrid: point " + std::to_string(i) + " lies left of the abscissa");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (points_[i] == points_[j]) throw ValidationError("ComplexGrid: duplicate point " + std::to_string(i));
      }
    }
  }

  /// Re(s) = 2 with Im(s) in {0, +-1, +-2}, plus the real points 3, 5, 9.
  static ComplexGrid default_grid() {
    return ComplexGrid({{2.0, 0.0}, {2.0, 1.0}, {2.0, -1.0}, {2.0, 2.0}, {2.0, -2.0}, {3.0, 0.0}, {5.0, 0.0}, {9.0, 0.0}},
                       2.0);
  }

  /// n real points evenly spaced over [lo, hi].
  static ComplexGrid real_span(double lo, double hi, int n) {
    std::vector<cplx> pts;
    for (int k = 0; k < n; ++k) pts.emplace_back(n == 1 ? lo : lo + (hi - lo) * k / (n - 1), 0.0);
    return ComplexGrid(std::move(pts), lo);
  }

  const std::vector<cplx>& points() const { return points_; }
  double abscissa() const { return abscissa_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<cplx> points_;
  double abscissa_ = 1.0;
};

enum class TransformMethod { classical_quadrature, closed_form, regularized_power };

inline const char* to_string(TransformMethod m) {
  switch (m) {
    case TransformMethod::classical_quadrature: return "classical_quadrature";
    case TransformMethod::closed_form: return "closed_form";
    case TransformMethod::regularized_power: return "regularized_power";
  }
  return "?";
}

struct TransformSample {
  ComplexGrid grid;
  std::vector<cplx> values;
  TransformMethod method = TransformMethod::closed_form;
  std::vector<bool> converged;  // per point; analytic samples are always converged

  static TransformSample analytic(const ComplexGrid& grid, TransformMethod method, const std::function<cplx(cplx)>& f) {
    TransformSample out{grid, {}, method, {}};
    for (const cplx& s : grid.points()) out.values.push_back(f(s));
    out.converged.assign(grid.size(), true);
    return out;
  }
};

/// An order value xi(sigma, t') pinned at a point t' that is not the
/// integration variable of any transform. Only constructible from an
/// OrderFunction evaluation, so the range check always runs.
class FrozenOrder {
 public:
  FrozenOrder(const OrderFunction& xi, double sigma, double t_prime)
      : t_prime_(t_prime), sigma_(sigma), value_(xi(sigma, t_prime)) {}

  double t_prime() const { return t_prime_; }
  double sigma() const { return sigma_; }
  double value() const { return value_; }

 private:
  double t_prime_;
  double sigma_;
  double value_;
};

namespace detail {

// Function values cached by exact t. Inner NonConvergence keeps the partial
// value and marks the sample as unconverged.
class MemoizedFunction {
 public:
  explicit MemoizedFunction(const ScalarFunction& f) : f_(f) {}

  double operator()(double t, bool& ok) {
    auto it = cache_.find(t);
    if (it == cache_.end()) {
      Entry e;
      try {
        e.value = f_(t);
      } catch (const NonConvergence& err) {
        e.value = err.partial().value;
        e.ok = false;
      }
      it = cache_.emplace(t, e).first;
    }
    if (!it->second.ok) ok = false;
    return it->second.value;
  }

 private:
  struct Entry {
    double value = 0.0;
    bool ok = true;
  };
  const ScalarFunction& f_;
  std::unordered_map<double, Entry> cache_;
};

// Integrates both parts of a complex integrand as two real quadratures.
template <class F>
cplx integrate_complex(F&& f, const std::function<QuadResult(const std::function<double(double)>&)>& engine,
                       bool real_only, bool& ok) {
  const QuadResult re = engine([&](double t) { return f(t).real(); });
  ok = ok && re.converged;
  if (real_only) return {re.value, 0.0};
  const QuadResult im = engine([&](double t) { return f(t).imag(); });
  ok = ok && im.converged;
  return {re.value, im.value};
}

// (e^z - sum_{i<m} z^i/i!) / z^m = sum_{i>=0} z^i / (i+m)!
inline cplx exp_tail_ratio(cplx z, int m) {
  if (std::abs(z) < 1.0) {
    double fact = 1.0;
    for (int i = 2; i <= m; ++i) fact *= i;
    cplx term = 1.0 / fact;
    cplx sum = term;
    for (int i = 1; i < 60; ++i) {
      term *= z / static_cast<double>(i + m);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  cplx poly = 0.0;
  cplx term = 1.0;
  for (int i = 0; i < m; ++i) {
    poly += term;
    term *= z / static_cast<double>(i + 1);
  }
  return (std::exp(z) - poly) / std::pow(z, m);
}

}  // namespace detail

/// Classical transform int_0^inf e^(-st) psi(t) dt at every grid point.
///
/// psi must declare a growth bound with rate below the grid abscissa. A
/// declared origin power p in (-1, 0) or non-integer p > 0 routes [0, 1]
/// through the Jacobi rule with weight t^(p - ceil(p)); p <= -1 has no
/// classical transform and is refused.
inline TransformSample forward_lt(const ScalarFunction& psi, const ComplexGrid& grid, const QuadConfig& cfg = {}) {
  cfg.validate();
  if (!psi.growth_bound()) throw AbscissaError("forward_lt: function declares no growth bound");
  psi.check_growth_bound();
  const auto growth = *psi.growth_bound();
  if (!(growth.rate < grid.abscissa())) {
    throw AbscissaError("forward_lt: growth rate " + std::to_string(growth.rate) + " is not below the abscissa " +
                        std::to_string(grid.abscissa()));
  }
  const auto& origin = psi.origin_power();
  if (origin && *origin <= -1.0) {
    throw SingularAtOrigin("forward_lt: t^" + std::to_string(*origin) +
                           " is not locally integrable at 0; use the regularized transform");
  }
  const bool singular_start = origin && *origin != std::floor(*origin);
  const double mu = singular_start ? *origin - std::ceil(*origin) : 0.0;
  const double split = singular_start ? std::min(1.0, 0.5 * psi.horizon()) : 0.0;

  detail::MemoizedFunction f(psi);
  TransformSample out{grid, {}, TransformMethod::classical_quadrature, {}};
  for (const cplx& s : grid.points()) {
    bool ok = true;
    const bool real_only = s.imag() == 0.0;
    const double decay = s.real() - growth.rate;
    cplx value = 0.0;
    if (singular_start) {
      auto g = [&](double t) { return std::exp(-s * t) * f(t, ok) * std::pow(t, -mu); };
      value += detail::integrate_complex(
          g, [&](const std::function<double(double)>& h) { return integrate_endpoint_singular(h, 0.0, split, mu, false, cfg); },
          real_only, ok);
    }
    auto integrand = [&](double t) { return std::exp(-s * t) * f(t, ok); };
    const double bound = growth.constant * std::exp(-decay * split);
    value += detail::integrate_complex(
        integrand,
        [&](const std::function<double(double)>& h) {
          return integrate_halfline(h, split, decay, cfg, bound, psi.horizon());
        },
        real_only, ok);
    out.values.push_back(value);
    out.converged.push_back(ok);
  }
  return out;
}

/// Transform taken from the function's registered closed form.
inline TransformSample closed_form_lt(const ScalarFunction& psi, const ComplexGrid& grid) {
  if (!psi.closed_form_transform()) throw DomainError("closed_form_lt: function has no closed-form transform");
  return TransformSample::analytic(grid, TransformMethod::closed_form, *psi.closed_form_transform());
}

enum class PowerNormalization {
  raw,            ///< L[t^mu] = Gamma(mu + 1) s^(-mu - 1)
  gamma_divided,  ///< L[t^mu / Gamma(mu + 1)] = s^(-mu - 1), entire in mu
};

/// Analytic continuation of the transform of t^mu to every real mu,
/// including mu <= -1 where the defining integral diverges. The raw form is
/// undefined at the poles mu + 1 = 0, -1, ... and throws PoleError there.
inline TransformSample regularized_power_lt(double mu, const ComplexGrid& grid,
                                            PowerNormalization norm = PowerNormalization::raw) {
  double scale = 1.0;
  if (norm == PowerNormalization::raw) {
    const double r = rgamma(mu + 1.0);
    if (r == 0.0) throw PoleError("regularized_power_lt: Gamma(mu + 1) has a pole at mu = " + std::to_string(mu));
    scale = 1.0 / r;
  }
  return TransformSample::analytic(grid, TransformMethod::regularized_power,
                                   [&](cplx s) { return scale * cpow(s, -mu - 1.0); });
}

/// s^xi(sigma, t') at every grid point. Depends on the frozen value only.
inline TransformSample coimbra_symbol(const FrozenOrder& frozen, const ComplexGrid& grid) {
  return TransformSample::analytic(grid, TransformMethod::closed_form,
                                   [&](cplx s) { return cpow(s, frozen.value()); });
}

inline constexpr int kDefaultTalbotNodes = 32;

/// Fixed-Talbot inversion of F at time t (Abate-Valko contour
/// s(theta) = r theta (cot theta + i), r = 2M/(5t)).
inline double inverse_lt(const std::function<cplx(cplx)>& F, double t, int talbot_nodes = kDefaultTalbotNodes) {
  if (!(t > 0.0)) throw DomainError("inverse_lt: requires t > 0");
  if (talbot_nodes < 16) throw DomainError("inverse_lt: needs at least 16 Talbot nodes");
  const int m = talbot_nodes;
  const double r = 2.0 * m / (5.0 * t);
  auto eval = [&](cplx s) {
    cplx v;
    try {
      v = F(s);
    } catch (const std::exception& e) {
      throw ContourError(std::string("inverse_lt: transform failed at a contour node: ") + e.what());
    }
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw ContourError("inverse_lt: non-finite transform value at a contour node");
    }
    return v;
  };
  double sum = 0.5 * eval(cplx(r, 0.0)).real() * std::exp(r * t);
  for (int k = 1; k < m; ++k) {
    const double theta = k * std::numbers::pi / m;
    const double cot = std::cos(theta) / std::sin(theta);
    const cplx s(r * theta * cot, r * theta);
    const double sigma = theta + (theta * cot - 1.0) * cot;
    sum += (std::exp(t * s) * eval(s) * cplx(1.0, sigma)).real();
  }
  return r / m * sum;
}

enum class DerivativeMode {
  rule,    ///< s Psi(s) - psi(0)
  direct,  ///< forward transform of psi' itself
};

inline TransformSample lt_of_derivative(const ScalarFunction& psi, const ComplexGrid& grid, const QuadConfig& cfg = {},
                                        DerivativeMode mode = DerivativeMode::rule) {
  if (mode == DerivativeMode::direct) return forward_lt(psi.derivative_function(), grid, cfg);
  TransformSample out = forward_lt(psi, grid, cfg);
  const double at_zero = psi(0.0);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = grid.points()[i] * out.values[i] - at_zero;
  return out;
}

/// Hadamard finite part of int_0^inf e^(-st) t^p h(t) dt for p <= 0.
///
/// With N the smallest count such that p + N > -1, the Taylor polynomial of
/// degree N-1 of g(t) = e^(-st) h(t) is removed on [0, 1]; each removed
/// monomial contributes g_k / (p + k + 1) (zero when p + k + 1 = 0, the
/// Hadamard convention), the remainder is integrated with the Jacobi weight
/// t^(p+N), and [1, inf) is a classical tail. `jet` holds h^(k)(0)/k! for
/// k < N. For non-integer p this equals the analytic continuation in p.
inline TransformSample finite_part_lt(const ScalarFunction& h, double p, const std::vector<double>& jet,
                                      const ComplexGrid& grid, const QuadConfig& cfg = {}) {
  cfg.validate();
  if (!(p <= 0.0)) throw DomainError("finite_part_lt: requires p <= 0");
  int n_terms = 0;
  while (p + n_terms <= -1.0) ++n_terms;
  if (static_cast<int>(jet.size()) < n_terms) {
    throw DomainError("finite_part_lt: needs " + std::to_string(n_terms) + " Taylor coefficients of h at 0");
  }
  if (!h.growth_bound()) throw AbscissaError("finite_part_lt: h declares no growth bound");
  const auto growth = *h.growth_bound();
  if (!(growth.rate < grid.abscissa())) throw AbscissaError("finite_part_lt: growth rate not below the abscissa");
  const double mu = p + n_terms;

  detail::MemoizedFunction hv(h);
  TransformSample out{grid, {}, TransformMethod::regularized_power, {}};
  for (const cplx& s : grid.points()) {
    bool ok = true;
    const bool real_only = s.imag() == 0.0;

    // Taylor coefficients of e^(-st) h(t).
    std::vector<cplx> gk(n_terms, 0.0);
    for (int k = 0; k < n_terms; ++k) {
      cplx e = 1.0;  // (-s)^(k-j)/(k-j)!
      for (int j = k; j >= 0; --j) {
        gk[k] += jet[j] * e;
        e *= -s / static_cast<double>(k - j + 1);
      }
    }
    cplx value = 0.0;
    for (int k = 0; k < n_terms; ++k) {
      const double denom = p + k + 1.0;
      if (std::abs(denom) > 1e-12) value += gk[k] / denom;
    }

    auto remainder = [&](double t) {
      double poly = 0.0;
      double tp = 1.0;
      for (int j = 0; j < n_terms; ++j) {
        poly += jet[j] * tp;
        tp *= t;
      }
      cplx r = std::exp(-s * t) * (hv(t, ok) - poly) / std::pow(t, n_terms);
      for (int j = 0; j < n_terms; ++j) r += jet[j] * std::pow(-s, n_terms - j) * detail::exp_tail_ratio(-s * t, n_terms - j);
      return r;
    };
    value += detail::integrate_complex(
        remainder,
        [&](const std::function<double(double)>& f) { return integrate_endpoint_singular(f, 0.0, 1.0, mu, false, cfg); },
        real_only, ok);

    const double decay = s.real() - growth.rate;
    auto tail = [&](double t) { return std::exp(-s * t) * std::pow(t, p) * hv(t, ok); };
    value += detail::integrate_complex(
        tail,
        [&](const std::function<double(double)>& f) {
          return integrate_halfline(f, 1.0, decay, cfg, growth.constant * std::exp(-decay), h.horizon());
        },
        real_only, ok);
    out.values.push_back(value);
    out.converged.push_back(ok);
  }
  return out;
}

}  // namespace vofrac
