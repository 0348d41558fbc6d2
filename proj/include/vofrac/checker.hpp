#pragma once

// Residual checks of transform identities for variable-order Caputo
// operators. Each check evaluates a left side and one or more right-side
// variants on a complex grid and classifies the pointwise residuals.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "vofrac/errors.hpp"
#include "vofrac/laplace.hpp"
#include "vofrac/quad.hpp"
#include "vofrac/specialfn.hpp"
#include "vofrac/voperators.hpp"

namespace vofrac {

enum class Verdict { holds, fails, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "HOLDS";
    case Verdict::fails: return "FAILS";
    case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

inline constexpr double kHoldsThreshold = 1e-6;
inline constexpr double kFailsThreshold = 1e-1;
inline constexpr double kResidualFloor = 1e-12;
inline constexpr double kMinConvergedFraction = 0.8;

inline const std::vector<std::string>& identity_names() {
  static const std::vector<std::string> names = {"caputo_lt", "frozen_order", "phi_scaled", "convolution",
                                                 "vo_caputo_lt"};
  return names;
}

struct IdentityCase {
  std::string name;
  ScalarFunction psi;
  OrderFunction xi;
  ScaleFunction phi;
  Interval iv;
  ComplexGrid grid;
  std::vector<double> t_eval_points;
  double t_prime = 1.0;
  std::set<std::string> checks;  // empty selects every identity

  double sigma() const { return psi.sigma(); }

  bool selects(const std::string& identity) const { return checks.empty() || checks.count(identity) > 0; }

  void validate() const {
    if (name.empty()) throw ValidationError("IdentityCase: empty name");
    for (double t : t_eval_points) {
      if (!(t > iv.a && t < iv.b)) {
        throw ValidationError("IdentityCase " + name + ": t_eval point " + std::to_string(t) + " outside (a, b)");
      }
    }
    for (const auto& c : checks) {
      if (std::find(identity_names().begin(), identity_names().end(), c) == identity_names().end()) {
        throw ValidationError("IdentityCase " + name + ": unknown identity " + c);
      }
    }
    constexpr int n = 400;
    for (int k = 0; k <= n; ++k) {
      const double t = iv.a + (iv.b - iv.a) * k / n;
      try {
        xi(sigma(), t);
      } catch (const OrderRangeError& e) {
        throw ValidationError("IdentityCase " + name + ": " + e.what());
      }
    }
    phi.validate(iv);
  }
};

struct VariantResult {
  std::string label;
  TransformSample lhs;
  TransformSample rhs;
  std::vector<double> residuals;
  std::vector<bool> converged;
  double rel_residual = 0.0;
  Verdict verdict = Verdict::inconclusive;

  /// Share of converged grid points whose residual is at least `threshold`.
  double fraction_at_least(double threshold) const {
    std::size_t n = 0, hit = 0;
    for (std::size_t i = 0; i < residuals.size(); ++i) {
      if (!converged[i]) continue;
      ++n;
      if (residuals[i] >= threshold) ++hit;
    }
    return n ? static_cast<double>(hit) / static_cast<double>(n) : 0.0;
  }
};

struct ResidualReport {
  std::string case_name;
  std::string identity;
  std::vector<VariantResult> variants;
  std::string headline;
  std::vector<std::string> notes;
  std::vector<std::string> warnings;
  std::optional<std::string> error;

  const VariantResult* find(const std::string& label) const {
    for (const auto& v : variants) {
      if (v.label == label) return &v;
    }
    return nullptr;
  }

  Verdict verdict() const {
    if (error) return Verdict::inconclusive;
    const VariantResult* h = find(headline);
    return h ? h->verdict : Verdict::inconclusive;
  }
};

namespace detail {

inline std::string t_label(const std::string& prefix, double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%st=%g", prefix.c_str(), t);
  return buf;
}

inline Verdict classify(const std::vector<double>& residuals, const std::vector<bool>& converged, double& worst) {
  const std::size_t n = residuals.size();
  std::size_t n_conv = 0;
  worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!converged[i]) continue;
    ++n_conv;
    worst = std::max(worst, residuals[i]);
  }
  if (n_conv == 0) {
    for (double r : residuals) worst = std::max(worst, r);
    return Verdict::inconclusive;
  }
  if (static_cast<double>(n_conv) < kMinConvergedFraction * static_cast<double>(n)) return Verdict::inconclusive;
  if (worst <= kHoldsThreshold) return Verdict::holds;
  if (worst >= kFailsThreshold) return Verdict::fails;
  return Verdict::inconclusive;
}

// Pointwise |lhs - rhs| / max(|lhs|, |rhs|, scale, floor), where scale is
// the largest single term on the right side.
inline VariantResult make_variant(std::string label, const TransformSample& lhs, const TransformSample& rhs,
                                  const std::vector<double>& scale) {
  VariantResult v{std::move(label), lhs, rhs, {}, {}, 0.0, Verdict::inconclusive};
  for (std::size_t i = 0; i < lhs.values.size(); ++i) {
    const double denom =
        std::max({std::abs(lhs.values[i]), std::abs(rhs.values[i]), scale.empty() ? 0.0 : scale[i], kResidualFloor});
    v.residuals.push_back(std::abs(lhs.values[i] - rhs.values[i]) / denom);
    v.converged.push_back(lhs.converged[i] && rhs.converged[i]);
  }
  v.verdict = classify(v.residuals, v.converged, v.rel_residual);
  return v;
}

// Pointwise best pairing over the per-t variants.
inline VariantResult min_over_t(const std::vector<VariantResult>& per_t, const std::string& label) {
  VariantResult out = per_t.front();
  out.label = label;
  for (const auto& v : per_t) {
    for (std::size_t i = 0; i < v.residuals.size(); ++i) {
      if (v.residuals[i] < out.residuals[i]) {
        out.residuals[i] = v.residuals[i];
        out.rhs.values[i] = v.rhs.values[i];
        out.rhs.converged[i] = v.rhs.converged[i];
        out.converged[i] = v.converged[i];
      }
    }
  }
  out.verdict = classify(out.residuals, out.converged, out.rel_residual);
  return out;
}

inline QuadConfig inner_config(const QuadConfig& cfg) {
  QuadConfig c = cfg;
  c.rel_tol = std::max(cfg.rel_tol * 1e-2, 1e-13);
  c.abs_tol = cfg.abs_tol * 1e-2;
  return c;
}

// |f(t)| <= C e^(rate t) with C read off samples on (0, hi] and doubled.
inline ScalarFunction::GrowthBound sampled_growth(const std::function<double(double)>& f, double rate, double hi) {
  double c = 0.0;
  auto probe = [&](double t) {
    double v = 0.0;
    try {
      v = f(t);
    } catch (const NonConvergence& e) {
      v = e.partial().value;
    }
    c = std::max(c, std::abs(v) * std::exp(-rate * t));
  };
  const double top = std::isfinite(hi) ? hi : 60.0;
  for (int k = 1; k <= 200; ++k) probe(top * k / 200.0);
  for (int k = 1; k <= 50 && k <= top; ++k) probe(k);
  return {std::max(2.0 * c, 1e-300), rate};
}

inline ScalarFunction with_growth_if_missing(const ScalarFunction& f, double rate, double hi) {
  if (f.growth_bound()) return f;
  ScalarFunction g = f;
  g.with_growth(sampled_growth([&](double t) { return f(t); }, rate, hi));
  return g;
}

inline void require_origin(const IdentityCase& c, const char* who) {
  if (c.iv.a != 0.0) throw DomainError(std::string(who) + ": requires a = 0");
  if (c.t_eval_points.empty()) throw DomainError(std::string(who) + ": needs at least one t_eval point");
}

// Transform of t -> D(t) where each D value is itself a quadrature.
inline TransformSample nested_transform(std::function<double(double)> eval, std::optional<double> origin_power,
                                        double horizon, const ComplexGrid& grid, const QuadConfig& cfg) {
  const double rate = 0.5 * grid.abscissa();
  const auto growth = sampled_growth(eval, rate, horizon);
  ScalarFunction d(std::move(eval));
  d.with_growth(growth).with_horizon(horizon);
  if (origin_power) d.with_origin_power(*origin_power);
  return forward_lt(d, grid, cfg);
}

// Leading exponent of the left Caputo derivative near t = 0, when it can
// be read off the inputs.
inline std::optional<double> caputo_origin_power(const IdentityCase& c) {
  double m = 1.0;
  if (const auto& pf = c.phi.power_form()) {
    m = pf->exponent;
  } else if (!c.phi.is_identity() && std::abs(c.phi.derivative(0.0)) < 1e-12) {
    return std::nullopt;
  }
  const double lead = std::abs(c.psi.derivative(0.0)) > 1e-14 ? 1.0 : 2.0;
  return lead - m * c.xi(c.sigma(), 0.0);
}

inline TransformSample vo_caputo_transform(const IdentityCase& c, const QuadConfig& cfg) {
  const QuadConfig inner = inner_config(cfg);
  auto eval = [c, inner](double t) { return vo_caputo_left(c.psi, c.xi, c.phi, c.iv, std::min(t, c.iv.b), inner); };
  return nested_transform(eval, caputo_origin_power(c), c.iv.b, c.grid, cfg);
}

inline TransformSample psi_transform(const IdentityCase& c, const QuadConfig& cfg) {
  return forward_lt(with_growth_if_missing(c.psi, 0.5 * c.grid.abscissa(), c.iv.b), c.grid, cfg);
}

// Finite-part transform of phi(t)^p for p < 0.
inline TransformSample phi_power_transform(const ScaleFunction& phi, double p, const ComplexGrid& grid,
                                           const QuadConfig& cfg) {
  const double phi0 = phi(0.0);
  if (phi0 < 0.0) throw DomainError("phi_scaled: requires phi(0) >= 0");
  if (phi0 > 0.0) {
    ScalarFunction f([phi, p](double t) { return std::pow(phi(t), p); });
    f.with_growth({std::pow(phi0, p) * (1.0 + 1e-9), 0.0});
    return forward_lt(f, grid, cfg);
  }
  std::optional<ScaleFunction::PowerForm> pf = phi.power_form();
  if (!pf && phi.is_identity()) pf = ScaleFunction::PowerForm{1.0, 1.0};
  if (pf) {
    const double cp = std::pow(pf->coef, p);
    ScalarFunction h([cp](double) { return cp; }, [](double) { return 0.0; });
    h.with_growth({std::abs(cp) * (1.0 + 1e-9), 0.0});
    std::vector<double> jet(8, 0.0);
    jet[0] = cp;
    return finite_part_lt(h, pf->exponent * p, jet, grid, cfg);
  }
  const double d0 = phi.derivative(0.0);
  if (!(d0 > 0.0)) throw DomainError("phi_scaled: phi(0) = 0 with phi'(0) = 0 and no declared power form");
  if (!(p > -2.0)) throw DomainError("phi_scaled: exponent below -2 needs a Taylor jet of phi(t)/t");
  auto hf = [phi, p, d0](double t) { return t == 0.0 ? std::pow(d0, p) : std::pow(phi(t) / t, p); };
  ScalarFunction h(hf);
  h.with_growth(sampled_growth(hf, 0.5 * grid.abscissa(), 60.0));
  return finite_part_lt(h, p, {std::pow(d0, p)}, grid, cfg);
}

inline constexpr double kUnfrozenCut = 1e-6;

// Finite part of int_0^inf e^(-st) t^(-1-xi(t)) / Gamma(-xi(t)) dt. On
// [0, eps] the integrand is replaced by
//   e^(-st) t^(-1-xi0) r0 (1 + t (b1 - xi1 log t)),
// r = 1/Gamma(-xi), xi1 = xi'(0), b1 = xi1 digamma(-xi0), whose finite part
// is summed termwise; [eps, inf) is a classical transform.
inline TransformSample unfrozen_power_lt(const OrderFunction& xi, double sigma, const ComplexGrid& grid,
                                         const QuadConfig& cfg) {
  const double eps = kUnfrozenCut;
  const double xi0 = xi(sigma, 0.0);
  const double dh = 1e-4;
  const double xi1 = (-3.0 * xi0 + 4.0 * xi(sigma, dh) - xi(sigma, 2.0 * dh)) / (2.0 * dh);
  const double gh = 1e-5;
  const double digamma = (std::lgamma(-xi0 + gh) - std::lgamma(-xi0 - gh)) / (2.0 * gh);
  const double r0 = rgamma(-xi0);
  const double b1 = xi1 * digamma;
  const double log_eps = std::log(eps);

  auto f = [xi, sigma](double t) {
    const double x = xi(sigma, t);
    return std::pow(t, -1.0 - x) * rgamma(-x);
  };
  const auto growth = sampled_growth([&](double t) { return t < 1.0 ? 0.0 : f(t); }, 0.0, 60.0);

  TransformSample out{grid, {}, TransformMethod::regularized_power, {}};
  for (const cplx& s : grid.points()) {
    bool ok = true;
    const bool real_only = s.imag() == 0.0;
    // sum_k (-s)^k / k! times the finite parts of t^(q+k), t^(q+k+1), t^(q+k+1) log t on [0, eps].
    cplx local = 0.0;
    cplx coef = 1.0;
    for (int k = 0; k < 40; ++k) {
      const double m0 = -xi0 + k;
      const double m1 = m0 + 1.0;
      const double e0 = std::pow(eps, m0), e1 = std::pow(eps, m1);
      const cplx term = coef * (e0 / m0 + b1 * e1 / m1 - xi1 * e1 * (log_eps / m1 - 1.0 / (m1 * m1)));
      local += term;
      if (k > 2 && std::abs(term) < 1e-18 * std::abs(local)) break;
      coef *= -s * 1.0 / static_cast<double>(k + 1);
    }
    cplx value = r0 * local;
    auto near = [&](double t) { return std::exp(-s * t) * f(t); };
    value += integrate_complex(
        near, [&](const std::function<double(double)>& h) { return integrate_smooth(h, eps, 1.0, cfg); }, real_only,
        ok);
    const double decay = s.real();
    value += integrate_complex(
        near,
        [&](const std::function<double(double)>& h) {
          return integrate_halfline(h, 1.0, decay, cfg, growth.constant * std::exp(-decay));
        },
        real_only, ok);
    out.values.push_back(value);
    out.converged.push_back(ok);
  }
  return out;
}

}  // namespace detail

/// Constant-order Caputo transform rule with one initial value: the
/// standard form s^xi Psi - s^(xi-1) psi(0) and the variant with weight
/// s^0 on psi(0).
inline ResidualReport check_const_caputo_lt(const IdentityCase& c, double xi_const, int n = 1,
                                            const QuadConfig& cfg = {}) {
  if (n != 1) throw DomainError("caputo_lt: only n = 1 is supported");
  if (c.iv.a != 0.0) throw DomainError("caputo_lt: requires a = 0");
  if (!(xi_const > 0.0 && xi_const < 1.0)) throw OrderRangeError("caputo_lt: order violates 0<xi<1");
  ResidualReport rep{c.name, "caputo_lt", {}, "standard", {}, {}, std::nullopt};

  const QuadConfig inner = detail::inner_config(cfg);
  auto eval = [c, xi_const, inner](double t) { return caputo_const_left(c.psi, xi_const, c.iv, std::min(t, c.iv.b), inner); };
  const double lead = std::abs(c.psi.derivative(0.0)) > 1e-14 ? 1.0 : 2.0;
  const TransformSample lhs = detail::nested_transform(eval, lead - xi_const, c.iv.b, c.grid, cfg);
  const TransformSample Psi = detail::psi_transform(c, cfg);
  const double psi0 = c.psi(0.0);

  TransformSample standard = Psi, printed = Psi;
  std::vector<double> scale_std, scale_prn;
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    const cplx s = c.grid.points()[i];
    const cplx main = cpow(s, xi_const) * Psi.values[i];
    const cplx init_std = cpow(s, xi_const - 1.0) * psi0;
    standard.values[i] = main - init_std;
    printed.values[i] = main - psi0;
    scale_std.push_back(std::max(std::abs(main), std::abs(init_std)));
    scale_prn.push_back(std::max(std::abs(main), std::abs(psi0)));
  }
  rep.variants.push_back(detail::make_variant("standard", lhs, standard, scale_std));
  rep.variants.push_back(detail::make_variant("printed", lhs, printed, scale_prn));
  if (psi0 == 0.0) {
    rep.notes.push_back("psi(0) = 0: standard and printed rules coincide, case does not discriminate");
  } else {
    const Verdict a = rep.variants[0].verdict, b = rep.variants[1].verdict;
    if (a == Verdict::holds && b != Verdict::holds) {
      rep.notes.push_back("data supports the s^(xi-1) weight on psi(0); the s^0 weight does not hold");
    } else if (b == Verdict::holds && a != Verdict::holds) {
      rep.notes.push_back("data supports the s^0 weight on psi(0)");
    }
  }
  if (!c.psi.has_analytic_derivative()) rep.warnings.push_back("psi' by central finite differences");
  return rep;
}

/// Power-law transform with the order frozen at t' (variant "frozen")
/// against the reading where the order varies with the transform's own
/// integration variable (variants "unfrozen_*").
inline ResidualReport check_frozen_vs_unfrozen(const std::string& case_name, const OrderFunction& xi, double sigma,
                                               double t_prime, const ComplexGrid& grid,
                                               const std::vector<double>& t_eval, const QuadConfig& cfg = {}) {
  if (t_eval.empty()) throw DomainError("frozen_order: needs at least one t_eval point");
  ResidualReport rep{case_name, "frozen_order", {}, "unfrozen_min_over_t", {}, {}, std::nullopt};

  const FrozenOrder frozen(xi, sigma, t_prime);
  const double q = frozen.value();
  TransformSample a_lhs = regularized_power_lt(-1.0 - q, grid);
  const double g = gamma(-q);
  for (auto& v : a_lhs.values) v /= g;
  const TransformSample symbol = coimbra_symbol(frozen, grid);
  rep.variants.push_back(detail::make_variant("frozen", a_lhs, symbol, {}));

  TransformSample b_lhs = a_lhs;
  if (xi.is_constant()) {
    const double r0 = rgamma(-q);
    ScalarFunction h([r0](double) { return r0; }, [](double) { return 0.0; });
    h.with_growth({std::abs(r0) * (1.0 + 1e-9), 0.0});
    b_lhs = finite_part_lt(h, -1.0 - q, {r0}, grid, cfg);
  } else {
    b_lhs = detail::unfrozen_power_lt(xi, sigma, grid, cfg);
  }

  std::vector<VariantResult> per_t;
  for (double t : t_eval) {
    const FrozenOrder at_t(xi, sigma, t);
    per_t.push_back(detail::make_variant(detail::t_label("unfrozen_", t), b_lhs, coimbra_symbol(at_t, grid), {}));
  }
  rep.variants.insert(rep.variants.end(), per_t.begin(), per_t.end());
  rep.variants.push_back(detail::min_over_t(per_t, "unfrozen_min_over_t"));

  if (xi.is_constant()) {
    rep.notes.push_back("constant order: frozen and unfrozen readings coincide, comparison is vacuous");
  } else {
    rep.warnings.push_back(
        "regularization: the singularity strength of t^(-1-xi(t)) varies with t; finite part on [0, 1e-6] from a "
        "first-order expansion about t = 0");
  }
  return rep;
}

/// (1/Gamma(-xi(t'))) L[phi(t)^(-1-xi(t'))] against phi'(t) s^xi(t') at
/// each t_eval point.
inline ResidualReport check_phi_scaled_claim(const IdentityCase& c, double t_prime, const QuadConfig& cfg = {}) {
  detail::require_origin(c, "phi_scaled");
  ResidualReport rep{c.name, "phi_scaled", {}, "min_over_t", {}, {}, std::nullopt};
  const FrozenOrder frozen(c.xi, c.sigma(), t_prime);
  const double q = frozen.value();
  TransformSample lhs = detail::phi_power_transform(c.phi, -1.0 - q, c.grid, cfg);
  const double g = gamma(-q);
  for (auto& v : lhs.values) v /= g;
  const TransformSample symbol = coimbra_symbol(frozen, c.grid);

  std::vector<VariantResult> per_t;
  for (double t : c.t_eval_points) {
    TransformSample rhs = symbol;
    const double d = c.phi.derivative(t);
    for (auto& v : rhs.values) v *= d;
    per_t.push_back(detail::make_variant(detail::t_label("", t), lhs, rhs, {}));
  }
  rep.variants = per_t;
  rep.variants.push_back(detail::min_over_t(per_t, "min_over_t"));
  if (c.phi.is_identity()) rep.notes.push_back("phi(t) = t: right side reduces to the frozen-order symbol");
  return rep;
}

/// Transform of int_0^t k(t,s) psi'(s) ds against L[k] L[psi'] with the
/// difference kernel k(u) = u^(-xi(u)) / Gamma(1 - xi(u)).
inline ResidualReport check_convolution_step(const IdentityCase& c, const QuadConfig& cfg = {},
                                             const TransformSample* nested_lhs = nullptr) {
  detail::require_origin(c, "convolution");
  ResidualReport rep{c.name, "convolution", {}, "difference_kernel", {}, {}, std::nullopt};
  const TransformSample lhs = nested_lhs ? *nested_lhs : detail::vo_caputo_transform(c, cfg);
  const TransformSample Psi = detail::psi_transform(c, cfg);
  const double psi0 = c.psi(0.0);
  const double sigma = c.sigma();

  TransformSample K = Psi;
  if (c.xi.is_constant()) {
    const double x = c.xi(sigma, 0.0);
    K = TransformSample::analytic(c.grid, TransformMethod::regularized_power,
                                  [x](cplx s) { return cpow(s, x - 1.0); });
  } else {
    const OrderFunction xi = c.xi;
    auto kf = [xi, sigma](double u) {
      const double x = xi(sigma, u);
      return std::pow(u, -x) * rgamma(1.0 - x);
    };
    ScalarFunction k(kf);
    k.with_growth(detail::sampled_growth(kf, 0.5 * c.grid.abscissa(), c.iv.b));
    k.with_origin_power(-xi(sigma, 0.0));
    K = forward_lt(k, c.grid, cfg);
  }

  TransformSample rhs = Psi;
  std::vector<double> scale;
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    const cplx s = c.grid.points()[i];
    rhs.values[i] = K.values[i] * (s * Psi.values[i] - psi0);
    rhs.converged[i] = K.converged[i] && Psi.converged[i];
    scale.push_back(std::max(std::abs(K.values[i] * s * Psi.values[i]), std::abs(K.values[i] * psi0)));
  }
  rep.variants.push_back(detail::make_variant("difference_kernel", lhs, rhs, scale));

  if (c.xi.is_constant() && c.phi.is_identity()) {
    rep.notes.push_back("constant order, identity scale: kernel depends on t - s only");
  } else {
    rep.notes.push_back("kernel (phi(t)-phi(s))^(-xi(t)) is not a function of t - s");
  }
  if (c.psi.has_analytic_derivative() && c.psi.derivative(0.0) == 0.0 && c.psi.derivative(1.0) == 0.0 &&
      c.psi.derivative(2.0) == 0.0) {
    rep.notes.push_back("psi' vanishes: both sides are zero, case does not discriminate");
  }
  rep.notes.push_back(
      "the kernel rewrite u^(-xi)/Gamma(1-xi) -> u^(1-xi)/Gamma(-xi) is not probed; only the factorization step is");
  return rep;
}

/// L[cD^{xi(t);phi} psi] against phi'(t) s^xi(t) Psi(s) - phi'(t)
/// s^(xi(t)-1) psi(0) at each t_eval point.
inline ResidualReport check_vo_caputo_lt(const IdentityCase& c, const QuadConfig& cfg = {},
                                         const TransformSample* nested_lhs = nullptr) {
  detail::require_origin(c, "vo_caputo_lt");
  ResidualReport rep{c.name, "vo_caputo_lt", {}, "min_over_t", {}, {}, std::nullopt};
  const TransformSample lhs = nested_lhs ? *nested_lhs : detail::vo_caputo_transform(c, cfg);
  const TransformSample Psi = detail::psi_transform(c, cfg);
  const double psi0 = c.psi(0.0);

  std::vector<VariantResult> per_t;
  for (double t : c.t_eval_points) {
    const double order = c.xi(c.sigma(), t);
    const double d = c.phi.derivative(t);
    TransformSample rhs = Psi;
    std::vector<double> scale;
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      const cplx s = c.grid.points()[i];
      const cplx main = d * cpow(s, order) * Psi.values[i];
      const cplx init = d * cpow(s, order - 1.0) * psi0;
      rhs.values[i] = main - init;
      scale.push_back(std::max(std::abs(main), std::abs(init)));
    }
    per_t.push_back(detail::make_variant(detail::t_label("", t), lhs, rhs, scale));
  }
  rep.variants = per_t;
  rep.variants.push_back(detail::min_over_t(per_t, "min_over_t"));
  std::size_t unconverged = 0;
  for (bool ok : lhs.converged) unconverged += ok ? 0 : 1;
  if (unconverged > 0) {
    rep.warnings.push_back("nested quadrature did not converge at " + std::to_string(unconverged) + " of " +
                           std::to_string(lhs.converged.size()) + " grid points");
  }
  if (c.xi.is_constant() && c.phi.is_identity()) {
    rep.notes.push_back("control: constant order and identity scale, right side is the standard Caputo rule");
  }
  if (!c.psi.has_analytic_derivative()) rep.warnings.push_back("psi' by central finite differences");
  return rep;
}

/// Runs the selected identities on every case. Errors are recorded per
/// report; output is ordered by (case name, identity).
inline std::vector<ResidualReport> run_suite(const std::vector<IdentityCase>& cases, const std::set<std::string>& which,
                                             const QuadConfig& cfg = {}) {
  for (const auto& w : which) {
    if (std::find(identity_names().begin(), identity_names().end(), w) == identity_names().end()) {
      throw ValidationError("run_suite: unknown identity " + w);
    }
  }
  std::vector<ResidualReport> out;
  for (const auto& c : cases) {
    std::optional<TransformSample> nested;
    auto nested_lhs = [&]() -> const TransformSample* {
      if (!nested) nested = detail::vo_caputo_transform(c, cfg);
      return &*nested;
    };
    for (const auto& id : identity_names()) {
      if (!which.count(id) || !c.selects(id)) continue;
      try {
        if (id == "caputo_lt") {
          if (!c.xi.is_constant()) throw DomainError("caputo_lt: requires a constant order");
          out.push_back(check_const_caputo_lt(c, c.xi(c.sigma(), c.iv.a), 1, cfg));
        } else if (id == "frozen_order") {
          out.push_back(check_frozen_vs_unfrozen(c.name, c.xi, c.sigma(), c.t_prime, c.grid, c.t_eval_points, cfg));
        } else if (id == "phi_scaled") {
          out.push_back(check_phi_scaled_claim(c, c.t_prime, cfg));
        } else if (id == "convolution") {
          out.push_back(check_convolution_step(c, cfg, nested_lhs()));
        } else {
          out.push_back(check_vo_caputo_lt(c, cfg, nested_lhs()));
        }
      } catch (const std::exception& e) {
        ResidualReport r{c.name, id, {}, {}, {}, {}, std::string(e.what())};
        out.push_back(std::move(r));
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const ResidualReport& x, const ResidualReport& y) {
    return std::tie(x.case_name, x.identity) < std::tie(y.case_name, y.identity);
  });
  return out;
}

inline std::set<std::string> all_identities() { return {identity_names().begin(), identity_names().end()}; }

/// Built-in battery: a control case on which every identity holds, and
/// cases with variable order or nonlinear scale.
inline std::vector<IdentityCase> default_battery() {
  const Interval iv(0.0, 60.0);
  const ComplexGrid grid = ComplexGrid::default_grid();
  const std::vector<double> t_eval = {0.25, 0.5, 1.0, 2.0};

  auto ramp = [] {
    ScalarFunction f([](double t) { return t; }, [](double) { return 1.0; });
    f.with_growth({1.0, 0.5}).with_transform([](cplx s) { return 1.0 / (s * s); });
    return f;
  };
  auto shifted = [] {
    ScalarFunction f([](double t) { return 1.0 + t; }, [](double) { return 1.0; });
    f.with_growth({2.0, 0.5});
    return f;
  };
  auto decay_minus_one = [] {
    ScalarFunction f([](double t) { return std::exp(-t) - 1.0; }, [](double t) { return -std::exp(-t); });
    f.with_growth({1.0, 0.0});
    return f;
  };
  const OrderFunction half = OrderFunction::constant(0.5);

  std::vector<IdentityCase> cases;
  cases.push_back({"control", ramp(), half, ScaleFunction::identity(), iv, grid, t_eval, 1.0, {}});
  cases.push_back({"shifted_linear", shifted(), half, ScaleFunction::identity(), iv, grid, t_eval, 1.0,
                   {"caputo_lt", "vo_caputo_lt"}});
  cases.push_back({"phi_square", ramp(), half, ScaleFunction::power(1.0, 2.0), iv, grid, t_eval, 1.0,
                   {"phi_scaled", "convolution", "vo_caputo_lt"}});
  cases.push_back({"phi_double", ramp(), half, ScaleFunction::power(2.0, 1.0), iv, grid, t_eval, 1.0, {"phi_scaled"}});
  cases.push_back({"sin_order", decay_minus_one(),
                   OrderFunction([](double, double t) { return 0.4 + 0.2 * std::sin(t); }), ScaleFunction::identity(),
                   iv, grid, t_eval, 1.0, {"frozen_order", "convolution", "vo_caputo_lt"}});
  cases.push_back({"saturating_order", ramp(),
                   OrderFunction([](double, double t) { return 0.3 + 0.4 * t / (1.0 + t); }),
                   ScaleFunction::identity(), iv, grid, t_eval, 1.0, {"frozen_order", "convolution", "vo_caputo_lt"}});
  cases.push_back({"linear_order", ramp(),
                   OrderFunction([](double, double t) { return std::min(0.3 + 0.3 * t, 0.9); }),
                   ScaleFunction::identity(), iv, grid, t_eval, 1.0, {"frozen_order", "convolution"}});
  return cases;
}

}  // namespace vofrac
