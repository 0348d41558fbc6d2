#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vofrac/laplace.hpp"

namespace {

using vofrac::ComplexGrid;
using vofrac::cplx;
using vofrac::ScalarFunction;

const double kSqrtPi = std::sqrt(std::numbers::pi);

ComplexGrid at(cplx s) { return ComplexGrid({s}, s.real()); }

ScalarFunction one() { return ScalarFunction([](double) { return 1.0; }, [](double) { return 0.0; }).with_growth({1.0, 0.0}); }
ScalarFunction ramp() {
  // t <= e^(t/2) * 2/e < e^(t/2).
  return ScalarFunction([](double t) { return t; }, [](double) { return 1.0; }).with_growth({1.0, 0.5});
}
ScalarFunction decay() {
  return ScalarFunction([](double t) { return std::exp(-t); }, [](double t) { return -std::exp(-t); }).with_growth({1.0, -1.0});
}
ScalarFunction sqrt_law() {
  // 2 sqrt(t/pi) <= e^(t/2).
  return ScalarFunction([](double t) { return 2.0 * std::sqrt(t / std::numbers::pi); },
                        [](double t) { return 1.0 / std::sqrt(std::numbers::pi * t); })
      .with_growth({1.0, 0.5})
      .with_origin_power(0.5);
}

TEST(ComplexGrid, Validation) {
  EXPECT_THROW(ComplexGrid({{1.0, 0.0}}, 0.0), vofrac::ValidationError);
  EXPECT_THROW(ComplexGrid({}, 1.0), vofrac::ValidationError);
  EXPECT_THROW(ComplexGrid({{1.0, 0.0}, {1.0, 0.0}}, 1.0), vofrac::ValidationError);
  EXPECT_THROW(ComplexGrid({{0.5, 0.0}}, 1.0), vofrac::ValidationError);
  const ComplexGrid g;
  EXPECT_EQ(g.size(), 8u);
  EXPECT_EQ(g.abscissa(), 2.0);
}

TEST(ForwardLt, Examples) {
  EXPECT_NEAR(vofrac::forward_lt(one(), at(2.0)).values[0].real(), 0.5, 1e-12);
  EXPECT_NEAR(vofrac::forward_lt(decay(), at(1.0)).values[0].real(), 0.5, 1e-12);
  auto inv_sqrt = ScalarFunction([](double t) { return 1.0 / std::sqrt(t); }).with_growth({1.0, 0.0}).with_origin_power(-0.5);
  const auto r = vofrac::forward_lt(inv_sqrt, at(1.0));
  EXPECT_TRUE(r.converged[0]);
  EXPECT_NEAR(r.values[0].real(), kSqrtPi, 1e-10);
}

TEST(ForwardLt, MatchesClosedFormsOnDefaultGrid) {
  const ComplexGrid g;
  for (const auto& [fn, F] : std::vector<std::pair<ScalarFunction, std::function<cplx(cplx)>>>{
           {one(), [](cplx s) { return 1.0 / s; }},
           {ramp(), [](cplx s) { return 1.0 / (s * s); }},
           {decay(), [](cplx s) { return 1.0 / (s + 1.0); }},
           {sqrt_law(), [](cplx s) { return vofrac::cpow(s, -1.5); }}}) {
    const auto r = vofrac::forward_lt(fn, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const cplx want = F(g.points()[i]);
      EXPECT_TRUE(r.converged[i]);
      EXPECT_LE(std::abs(r.values[i] - want), 1e-9 * std::abs(want)) << g.points()[i];
    }
  }
}

TEST(ForwardLt, AgreesWithSimpsonOracle) {
  ScalarFunction f([](double t) { return std::sin(3.0 * t) * std::exp(-0.3 * t) + t * t; });
  f.with_growth({3.0, 0.9});
  const ComplexGrid g;
  const auto r = vofrac::forward_lt(f, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx s = g.points()[i];
    const cplx want = oracle::laplace_simpson([&](double t) { return f(t); }, s, 40.0, 200000);
    EXPECT_LE(std::abs(r.values[i] - want), 1e-9 * std::abs(want)) << s;
  }
}

TEST(ForwardLt, Refusals) {
  auto unbounded = ScalarFunction([](double t) { return std::exp(3.0 * t); }).with_growth({1.0, 3.0});
  EXPECT_THROW(vofrac::forward_lt(unbounded, ComplexGrid()), vofrac::AbscissaError);
  EXPECT_THROW(vofrac::forward_lt(ScalarFunction([](double) { return 1.0; }), ComplexGrid()), vofrac::AbscissaError);
  auto strong = ScalarFunction([](double t) { return std::pow(t, -1.5); }).with_growth({1.0, 0.0}).with_origin_power(-1.5);
  EXPECT_THROW(vofrac::forward_lt(strong, ComplexGrid()), vofrac::SingularAtOrigin);
  auto liar = ScalarFunction([](double t) { return std::exp(t); }).with_growth({1.0, 0.5});
  EXPECT_THROW(vofrac::forward_lt(liar, ComplexGrid()), vofrac::ValidationError);
}

TEST(RegularizedPowerLt, Examples) {
  EXPECT_NEAR(vofrac::regularized_power_lt(0.0, at(2.0)).values[0].real(), 0.5, 1e-15);
  const auto norm = vofrac::regularized_power_lt(-1.5, at(4.0), vofrac::PowerNormalization::gamma_divided);
  EXPECT_NEAR(norm.values[0].real(), 2.0, 1e-15);
  const auto raw = vofrac::regularized_power_lt(-1.5, at(4.0));
  EXPECT_NEAR(raw.values[0].real() / vofrac::gamma(-0.5), 2.0, 1e-14);
  EXPECT_NEAR(vofrac::regularized_power_lt(-0.5, at(1.0)).values[0].real(), kSqrtPi, 1e-14);
}

TEST(RegularizedPowerLt, PolesOnlyInRawForm) {
  EXPECT_THROW(vofrac::regularized_power_lt(-1.0, ComplexGrid()), vofrac::PoleError);
  EXPECT_THROW(vofrac::regularized_power_lt(-3.0, ComplexGrid()), vofrac::PoleError);
  const auto g = vofrac::regularized_power_lt(-1.0, at(3.0), vofrac::PowerNormalization::gamma_divided);
  EXPECT_NEAR(g.values[0].real(), 1.0, 1e-15);
}

TEST(RegularizedPowerLt, OverlapsClassicalTransform) {
  const ComplexGrid g({{1.0, 0.0}, {1.0, 3.0}, {2.5, -1.0}, {4.0, 0.0}, {6.0, 2.0}, {10.0, 0.0}, {10.0, -5.0}}, 1.0);
  for (double mu : {-0.2, -0.5, -0.8}) {
    auto f = ScalarFunction([mu](double t) { return std::pow(t, mu); }).with_growth({1.0, 0.0}).with_origin_power(mu);
    const auto classical = vofrac::forward_lt(f, g);
    const auto cont = vofrac::regularized_power_lt(mu, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_LE(std::abs(classical.values[i] - cont.values[i]), 1e-6 * std::abs(cont.values[i]))
          << "mu " << mu << " s " << g.points()[i];
    }
  }
}

TEST(CoimbraSymbol, Examples) {
  vofrac::OrderFunction half = vofrac::OrderFunction::constant(0.5);
  EXPECT_NEAR(vofrac::coimbra_symbol(vofrac::FrozenOrder(half, 0.0, 1.0), at(4.0)).values[0].real(), 2.0, 1e-15);
  vofrac::OrderFunction quarter = vofrac::OrderFunction::constant(0.25);
  EXPECT_NEAR(vofrac::coimbra_symbol(vofrac::FrozenOrder(quarter, 0.0, 3.0), at(16.0)).values[0].real(), 2.0, 1e-15);
  vofrac::OrderFunction var([](double, double t) { return 0.1 + 0.8 * t / (1.0 + t); });
  EXPECT_EQ(vofrac::coimbra_symbol(vofrac::FrozenOrder(var, 0.0, 2.0), at(1.0)).values[0], cplx(1.0, 0.0));
}

TEST(CoimbraSymbol, ConstantInTimeAndTracksFrozenPoint) {
  vofrac::OrderFunction var([](double, double t) { return 0.3 + 0.4 * t / (1.0 + t); });
  const ComplexGrid g;
  const vofrac::FrozenOrder f(var, 0.0, 1.0);
  const auto a = vofrac::coimbra_symbol(f, g);
  const auto b = vofrac::coimbra_symbol(f, g);
  EXPECT_EQ(a.values, b.values);
  for (double tp : {0.0, 0.5, 1.0, 3.0, 10.0}) {
    const auto r = vofrac::coimbra_symbol(vofrac::FrozenOrder(var, 0.0, tp), g);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(r.values[i], vofrac::cpow(g.points()[i], var(0.0, tp)));
  }
  EXPECT_THROW(vofrac::FrozenOrder(vofrac::OrderFunction([](double, double t) { return t; }), 0.0, 2.0),
               vofrac::OrderRangeError);
}

TEST(InverseLt, Examples) {
  EXPECT_NEAR(vofrac::inverse_lt([](cplx s) { return 1.0 / s; }, 1.0), 1.0, 1e-10);
  EXPECT_NEAR(vofrac::inverse_lt([](cplx s) { return 1.0 / (s * s); }, 2.5), 2.5, 1e-9);
  EXPECT_NEAR(vofrac::inverse_lt([](cplx s) { return vofrac::cpow(s, -1.5); }, 1.0), 2.0 / kSqrtPi, 1e-10);
}

TEST(InverseLt, RoundTripsKnownPairs) {
  struct Pair {
    std::function<cplx(cplx)> F;
    std::function<double(double)> f;
  };
  const std::vector<Pair> pairs = {
      {[](cplx s) { return 1.0 / s; }, [](double) { return 1.0; }},
      {[](cplx s) { return 1.0 / (s * s); }, [](double t) { return t; }},
      {[](cplx s) { return 1.0 / (s + 1.0); }, [](double t) { return std::exp(-t); }},
      {[](cplx s) { return vofrac::cpow(s, -1.5); }, [](double t) { return 2.0 * std::sqrt(t / std::numbers::pi); }},
  };
  for (const auto& p : pairs) {
    for (int k = 0; k < 50; ++k) {
      const double t = 0.1 + 4.9 * k / 49.0;
      const double want = p.f(t);
      EXPECT_NEAR(vofrac::inverse_lt(p.F, t), want, 1e-7 * std::abs(want)) << "t = " << t;
    }
  }
}

TEST(InverseLt, Errors) {
  EXPECT_THROW(vofrac::inverse_lt([](cplx s) { return 1.0 / s; }, 0.0), vofrac::DomainError);
  EXPECT_THROW(vofrac::inverse_lt([](cplx s) { return 1.0 / s; }, 1.0, 8), vofrac::DomainError);
  EXPECT_THROW(vofrac::inverse_lt([](cplx) -> cplx { throw vofrac::DomainError("no"); }, 1.0), vofrac::ContourError);
  EXPECT_THROW(vofrac::inverse_lt([](cplx) { return cplx(NAN, 0.0); }, 1.0), vofrac::ContourError);
}

TEST(LtOfDerivative, Examples) {
  for (const cplx& v : vofrac::lt_of_derivative(one(), ComplexGrid()).values) EXPECT_NEAR(std::abs(v), 0.0, 1e-12);
  EXPECT_NEAR(vofrac::lt_of_derivative(ramp(), at(2.0)).values[0].real(), 0.5, 1e-12);
  EXPECT_NEAR(vofrac::lt_of_derivative(decay(), at(1.0)).values[0].real(), -0.5, 1e-12);
}

TEST(LtOfDerivative, RuleAgreesWithDirectTransform) {
  const ComplexGrid g;
  ScalarFunction f([](double t) { return std::cos(t) * std::exp(-0.5 * t) + 0.2 * t * t; },
                   [](double t) { return -std::exp(-0.5 * t) * (std::sin(t) + 0.5 * std::cos(t)) + 0.4 * t; });
  f.with_growth({2.0, 0.5});
  const auto rule = vofrac::lt_of_derivative(f, g);
  const auto direct = vofrac::lt_of_derivative(f, g, {}, vofrac::DerivativeMode::direct);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_LE(std::abs(rule.values[i] - direct.values[i]), 1e-7 * std::abs(direct.values[i]));
  }
}

TEST(FinitePartLt, PowerContinuation) {
  // h = 1: the finite part is Gamma(p + 1) s^(-p-1) for non-integer p.
  const ComplexGrid g;
  for (double p : {-0.5, -1.3, -1.5, -2.25}) {
    const auto r = vofrac::finite_part_lt(one(), p, {1.0, 0.0, 0.0}, g);
    const auto want = vofrac::regularized_power_lt(p, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_TRUE(r.converged[i]);
      EXPECT_LE(std::abs(r.values[i] - want.values[i]), 1e-8 * std::abs(want.values[i])) << "p " << p;
    }
  }
}

TEST(FinitePartLt, IntegerPowerUsesHadamardConvention) {
  // fp int_0^inf e^(-st) / t dt = -gamma_E - log s.
  const ComplexGrid g;
  const auto r = vofrac::finite_part_lt(one(), -1.0, {1.0}, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx want = -std::numbers::egamma - std::log(g.points()[i]);
    EXPECT_LE(std::abs(r.values[i] - want), 1e-9 * std::abs(want));
  }
}

TEST(FinitePartLt, ShiftedExponentialFactor) {
  // t^p e^(-t): finite part is Gamma(p + 1) (s + 1)^(-p-1).
  const ComplexGrid g;
  const double p = -1.6;
  const auto r = vofrac::finite_part_lt(decay(), p, {1.0, -1.0}, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx want = vofrac::gamma(p + 1.0) * vofrac::cpow(g.points()[i] + 1.0, -p - 1.0);
    EXPECT_LE(std::abs(r.values[i] - want), 1e-8 * std::abs(want));
  }
}

TEST(FinitePartLt, Errors) {
  EXPECT_THROW(vofrac::finite_part_lt(one(), 0.5, {1.0}, ComplexGrid()), vofrac::DomainError);
  EXPECT_THROW(vofrac::finite_part_lt(one(), -2.5, {1.0}, ComplexGrid()), vofrac::DomainError);
}

}  // namespace
