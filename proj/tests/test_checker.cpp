#include <cmath>
#include <complex>
#include <cstring>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vofrac/checker.hpp"

namespace {

using namespace vofrac;
using Big = boost::multiprecision::cpp_bin_float_50;

constexpr double kEuler = 0.57721566490153286061;

ScalarFunction ramp() {
  ScalarFunction f([](double t) { return t; }, [](double) { return 1.0; });
  f.with_growth({1.0, 0.5});
  return f;
}

ScalarFunction shifted() {
  ScalarFunction f([](double t) { return 1.0 + t; }, [](double) { return 1.0; });
  f.with_growth({2.0, 0.5});
  return f;
}

ScalarFunction constant_one() {
  ScalarFunction f([](double) { return 1.0; }, [](double) { return 0.0; });
  f.with_growth({1.0, 0.0});
  return f;
}

IdentityCase make_case(std::string name, ScalarFunction psi, OrderFunction xi,
                       ScaleFunction phi = ScaleFunction::identity()) {
  return {std::move(name), std::move(psi), std::move(xi), std::move(phi), Interval(0.0, 60.0),
          ComplexGrid::default_grid(), {0.25, 0.5, 1.0, 2.0}, 1.0, {}};
}

OrderFunction saturating() {
  return OrderFunction([](double, double t) { return 0.3 + 0.4 * t / (1.0 + t); });
}

const IdentityCase& battery_case(const std::string& name) {
  static const std::vector<IdentityCase> cases = default_battery();
  for (const auto& c : cases) {
    if (c.name == name) return c;
  }
  throw std::runtime_error("no case " + name);
}

// Finite-part transform of t^(-1-xi(t)) / Gamma(-xi(t)) at real s in 50
// digits: subtract the frozen-at-0 term on [0, 1], integrate the rest
// classically.
double unfrozen_oracle(double s_d) {
  const Big s = s_d;
  auto xi = [](const Big& t) { return Big(0.3) + Big(0.4) * t / (1 + t); };
  const Big xi0 = xi(Big(0));
  const Big r0 = 1 / boost::math::tgamma(-xi0);
  auto near = [&](const Big& t) -> Big {
    if (t < 1e-200) return Big(0);
    return pow(t, -1 - xi0) * (exp(-s * t) * pow(t, xi0 - xi(t)) / boost::math::tgamma(-xi(t)) - r0);
  };
  auto far = [&](const Big& u) -> Big {
    const Big t = 1 + u;
    if (s * t > 1e5) return Big(0);
    return exp(-s * t) * pow(t, -1 - xi(t)) / boost::math::tgamma(-xi(t));
  };
  boost::math::quadrature::tanh_sinh<Big> ts;
  boost::math::quadrature::exp_sinh<Big> es;
  const Big v = ts.integrate(near, Big(0), Big(1), Big(1e-25)) - r0 / xi0 + es.integrate(far, Big(1e-25));
  return static_cast<double>(v);
}

TEST(Verdict, Strings) {
  EXPECT_STREQ(to_string(Verdict::holds), "HOLDS");
  EXPECT_STREQ(to_string(Verdict::fails), "FAILS");
  EXPECT_STREQ(to_string(Verdict::inconclusive), "INCONCLUSIVE");
}

TEST(Verdict, Thresholds) {
  double worst = 0.0;
  const std::vector<bool> ok(4, true);
  EXPECT_EQ(detail::classify({1e-7, 1e-9, 1e-6, 0.0}, ok, worst), Verdict::holds);
  EXPECT_EQ(worst, 1e-6);
  EXPECT_EQ(detail::classify({0.5, 0.1, 0.3, 2.0}, ok, worst), Verdict::fails);
  EXPECT_EQ(detail::classify({0.5, 0.09, 0.3, 2.0}, ok, worst), Verdict::fails);
  EXPECT_EQ(detail::classify({1e-3, 1e-9, 1e-9, 1e-9}, ok, worst), Verdict::inconclusive);
  EXPECT_EQ(detail::classify({1e-3, 1e-9, 1e-9, 1e-9}, {false, true, true, true}, worst), Verdict::inconclusive);
}

TEST(Verdict, NeedsEightyPercentConverged) {
  double worst = 0.0;
  std::vector<double> r(10, 1e-9);
  std::vector<bool> ok(10, true);
  ok[0] = ok[1] = false;
  EXPECT_EQ(detail::classify(r, ok, worst), Verdict::holds);
  ok[2] = false;
  EXPECT_EQ(detail::classify(r, ok, worst), Verdict::inconclusive);
}

TEST(Residual, FloorPreventsBlowup) {
  const ComplexGrid g({{2.0, 0.0}}, 2.0);
  TransformSample zero = TransformSample::analytic(g, TransformMethod::closed_form, [](cplx) { return cplx(0.0); });
  const VariantResult v = detail::make_variant("z", zero, zero, {});
  EXPECT_EQ(v.residuals[0], 0.0);
  EXPECT_EQ(v.verdict, Verdict::holds);
  TransformSample tiny = TransformSample::analytic(g, TransformMethod::closed_form, [](cplx) { return cplx(1e-15); });
  EXPECT_NEAR(detail::make_variant("t", zero, tiny, {}).residuals[0], 1e-3, 1e-18);
}

TEST(CaseValidation, OrderOutOfRange) {
  IdentityCase c = make_case("bad", ramp(), OrderFunction([](double, double t) { return 0.3 + 0.3 * t; }));
  try {
    c.validate();
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::strstr(e.what(), "0<xi(sigma,t)<1"), nullptr);
  }
}

TEST(CaseValidation, TEvalAndChecks) {
  IdentityCase c = make_case("c", ramp(), OrderFunction::constant(0.5));
  EXPECT_NO_THROW(c.validate());
  c.t_eval_points = {0.0};
  EXPECT_THROW(c.validate(), ValidationError);
  c.t_eval_points = {1.0};
  c.checks = {"nope"};
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(CaseValidation, BatteryIsValid) {
  for (const auto& c : default_battery()) EXPECT_NO_THROW(c.validate()) << c.name;
}

TEST(ConstCaputoLt, RampBothVariantsHold) {
  const IdentityCase c = make_case("ramp", ramp(), OrderFunction::constant(0.5));
  const ResidualReport r = check_const_caputo_lt(c, 0.5);
  ASSERT_EQ(r.variants.size(), 2u);
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    const cplx want = cpow(c.grid.points()[i], -1.5);
    EXPECT_LE(std::abs(r.variants[0].lhs.values[i] - want), 1e-9 * std::abs(want));
  }
  EXPECT_EQ(r.find("standard")->verdict, Verdict::holds);
  EXPECT_EQ(r.find("printed")->verdict, Verdict::holds);
  ASSERT_FALSE(r.notes.empty());
  EXPECT_NE(r.notes[0].find("does not discriminate"), std::string::npos);
}

TEST(ConstCaputoLt, ShiftedSplitsVariants) {
  const IdentityCase c = make_case("shift", shifted(), OrderFunction::constant(0.5));
  const ResidualReport r = check_const_caputo_lt(c, 0.5);
  EXPECT_EQ(r.find("standard")->verdict, Verdict::holds);
  EXPECT_LE(r.find("standard")->rel_residual, 1e-6);
  EXPECT_EQ(r.find("printed")->verdict, Verdict::fails);
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    const cplx s = c.grid.points()[i];
    const cplx printed = cpow(s, -0.5) + cpow(s, -1.5) - 1.0;
    EXPECT_LE(std::abs(r.find("printed")->rhs.values[i] - printed), 1e-9 * std::abs(printed));
  }
  EXPECT_EQ(r.verdict(), Verdict::holds);
  ASSERT_FALSE(r.notes.empty());
  EXPECT_NE(r.notes[0].find("s^(xi-1)"), std::string::npos);
}

TEST(ConstCaputoLt, ConstantPsiHolds) {
  for (double xi : {0.25, 0.5, 0.75}) {
    const IdentityCase c = make_case("one", constant_one(), OrderFunction::constant(xi));
    const ResidualReport r = check_const_caputo_lt(c, xi);
    for (const auto& v : r.find("standard")->lhs.values) EXPECT_EQ(v, cplx(0.0));
    EXPECT_EQ(r.find("standard")->verdict, Verdict::holds) << xi;
  }
}

TEST(ConstCaputoLt, Preconditions) {
  const IdentityCase c = make_case("c", ramp(), OrderFunction::constant(0.5));
  EXPECT_THROW(check_const_caputo_lt(c, 0.5, 2), DomainError);
  EXPECT_THROW(check_const_caputo_lt(c, 1.0), OrderRangeError);
  IdentityCase off = c;
  off.iv = Interval(1.0, 60.0);
  off.t_eval_points = {2.0};
  EXPECT_THROW(check_const_caputo_lt(off, 0.5), DomainError);
}

TEST(FrozenOrder, ConstantCoincides) {
  const auto grid = ComplexGrid::default_grid();
  const ResidualReport r =
      check_frozen_vs_unfrozen("c", OrderFunction::constant(0.5), 0.0, 1.0, grid, {0.25, 0.5, 1.0, 2.0});
  const VariantResult* a = r.find("frozen");
  const VariantResult* b = r.find("unfrozen_min_over_t");
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->verdict, Verdict::holds);
  EXPECT_EQ(b->verdict, Verdict::holds);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_LE(std::abs(a->lhs.values[i] - b->lhs.values[i]), 1e-10 * std::abs(a->lhs.values[i]));
  }
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_FALSE(r.notes.empty());
}

TEST(FrozenOrder, UnfrozenMatchesMultiprecisionOracle) {
  const ComplexGrid grid({{2.0, 0.0}, {3.0, 0.0}, {5.0, 0.0}, {8.0, 0.0}}, 2.0);
  const ResidualReport r = check_frozen_vs_unfrozen("sat", saturating(), 0.0, 1.0, grid, {0.5});
  const VariantResult* b = r.find("unfrozen_t=0.5");
  ASSERT_NE(b, nullptr);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double want = unfrozen_oracle(grid.points()[i].real());
    EXPECT_NEAR(b->lhs.values[i].real(), want, 1e-8 * std::abs(want)) << grid.points()[i];
    EXPECT_EQ(b->lhs.values[i].imag(), 0.0);
  }
}

TEST(FrozenOrder, SaturatingSplits) {
  const ComplexGrid grid({{2.0, 0.0}, {4.0, 0.0}, {6.0, 0.0}, {8.0, 0.0}}, 2.0);
  const ResidualReport r = check_frozen_vs_unfrozen("sat", saturating(), 0.0, 1.0, grid, {0.25, 0.5, 1.0, 2.0});
  EXPECT_EQ(r.find("frozen")->verdict, Verdict::holds);
  EXPECT_LE(r.find("frozen")->rel_residual, 1e-6);
  const VariantResult* best = r.find("unfrozen_min_over_t");
  EXPECT_EQ(best->verdict, Verdict::fails);
  for (double res : best->residuals) EXPECT_GE(res, 0.1);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings[0].find("regularization"), std::string::npos);
}

TEST(FrozenOrder, SymbolTracksTPrime) {
  const auto grid = ComplexGrid::default_grid();
  for (double tp : {0.0, 0.5, 3.0}) {
    const ResidualReport r = check_frozen_vs_unfrozen("sat", saturating(), 0.0, tp, grid, {1.0});
    const double q = 0.3 + 0.4 * tp / (1.0 + tp);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      EXPECT_EQ(r.find("frozen")->rhs.values[i], cpow(grid.points()[i], q));
    }
  }
}

TEST(FrozenOrder, ReductionToConstantPair) {
  // sigma = 0 and t' = 0 leave the constant alpha = xi(0, 0).
  const OrderFunction xi([](double sigma, double t) { return 0.35 + 0.2 * sigma + 0.1 * std::sin(t); });
  const auto grid = ComplexGrid::default_grid();
  const ResidualReport r = check_frozen_vs_unfrozen("red", xi, 0.0, 0.0, grid, {1.0});
  const VariantResult* a = r.find("frozen");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const cplx want = cpow(grid.points()[i], 0.35);
    EXPECT_LE(std::abs(a->lhs.values[i] - want), 1e-8 * std::abs(want));
  }
}

TEST(PhiScaled, IdentityReducesToFrozen) {
  const IdentityCase c = make_case("id", ramp(), saturating());
  const ResidualReport p = check_phi_scaled_claim(c, 1.0);
  const ResidualReport f = check_frozen_vs_unfrozen("id", c.xi, 0.0, 1.0, c.grid, c.t_eval_points);
  EXPECT_EQ(p.verdict(), Verdict::holds);
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    EXPECT_LE(std::abs(p.variants[0].lhs.values[i] - f.find("frozen")->lhs.values[i]),
              1e-12 * std::abs(f.find("frozen")->lhs.values[i]));
  }
}

TEST(PhiScaled, SquareMatchesFinitePartClosedForm) {
  // FP int_0^inf e^(-st) t^(-3) dt = (s^2 / 2) (3/2 - gamma - ln s).
  const IdentityCase c = make_case("sq", ramp(), OrderFunction::constant(0.5), ScaleFunction::power(1.0, 2.0));
  const ResidualReport r = check_phi_scaled_claim(c, 1.0);
  const double g = std::tgamma(-0.5);
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    const cplx s = c.grid.points()[i];
    const cplx want = s * s / 2.0 * (1.5 - kEuler - std::log(s)) / g;
    EXPECT_LE(std::abs(r.variants[0].lhs.values[i] - want), 1e-8 * std::abs(want)) << s;
  }
  EXPECT_EQ(r.verdict(), Verdict::fails);
  // The left side is the same for every t; the right side is not.
  EXPECT_EQ(r.variants[0].lhs.values, r.variants[3].lhs.values);
  EXPECT_NE(r.variants[0].rhs.values, r.variants[3].rhs.values);
}

TEST(PhiScaled, DoubleScaleClosedFormResidual) {
  for (double xi : {0.25, 0.5, 0.75}) {
    const IdentityCase c = make_case("dbl", ramp(), OrderFunction::constant(xi), ScaleFunction::power(2.0, 1.0));
    const ResidualReport r = check_phi_scaled_claim(c, 1.0);
    const double want = std::abs(std::pow(2.0, -1.0 - xi) - 2.0) / 2.0;
    EXPECT_NEAR(r.find("min_over_t")->rel_residual, want, 1e-6) << xi;
    EXPECT_EQ(r.verdict(), Verdict::fails);
  }
}

TEST(PhiScaled, RequiresOrigin) {
  IdentityCase c = make_case("off", ramp(), OrderFunction::constant(0.5));
  c.iv = Interval(1.0, 60.0);
  c.t_eval_points = {2.0};
  EXPECT_THROW(check_phi_scaled_claim(c, 1.0), DomainError);
}

TEST(Convolution, ControlHolds) {
  const IdentityCase c = make_case("ctl", ramp(), OrderFunction::constant(0.5));
  const ResidualReport r = check_convolution_step(c);
  EXPECT_EQ(r.verdict(), Verdict::holds);
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    const cplx want = cpow(c.grid.points()[i], -1.5);
    EXPECT_LE(std::abs(r.variants[0].rhs.values[i] - want), 1e-9 * std::abs(want));
  }
}

TEST(Convolution, ConstantPsiIsDegenerate) {
  const IdentityCase c = make_case("one", constant_one(), saturating());
  const ResidualReport r = check_convolution_step(c);
  EXPECT_EQ(r.verdict(), Verdict::holds);
  bool flagged = false;
  for (const auto& n : r.notes) flagged = flagged || n.find("does not discriminate") != std::string::npos;
  EXPECT_TRUE(flagged);
}

TEST(Convolution, LinearOrderFails) {
  const ResidualReport r = check_convolution_step(battery_case("linear_order"));
  EXPECT_EQ(r.verdict(), Verdict::fails);
  EXPECT_GE(r.variants[0].rel_residual, 0.1);
}

TEST(VoCaputoLt, ControlHolds) {
  const ResidualReport r = check_vo_caputo_lt(battery_case("control"));
  EXPECT_EQ(r.verdict(), Verdict::holds);
  EXPECT_LE(r.find("min_over_t")->rel_residual, 1e-6);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(VoCaputoLt, PhiSquareLeftSideClosedForm) {
  // (1/Gamma(1/2)) int_0^t (t^2 - s^2)^(-1/2) ds = sqrt(pi)/2 for every t.
  const IdentityCase& c = battery_case("phi_square");
  const ResidualReport r = check_vo_caputo_lt(c);
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    const cplx s = c.grid.points()[i];
    const cplx want = std::sqrt(std::numbers::pi) / 2.0 / s;
    EXPECT_LE(std::abs(r.variants[0].lhs.values[i] - want), 1e-8 * std::abs(want)) << s;
  }
  EXPECT_EQ(r.verdict(), Verdict::fails);
  EXPECT_GE(r.find("min_over_t")->fraction_at_least(0.1), 0.8);
}

TEST(VoCaputoLt, SinOrderLeftSideMatchesBruteForce) {
  const IdentityCase& c = battery_case("sin_order");
  const ResidualReport r = check_vo_caputo_lt(c);
  auto dpsi = [](double t) { return -std::exp(-t); };
  auto xi = [](double t) { return 0.4 + 0.2 * std::sin(t); };
  auto id = [](double t) { return t; };
  for (std::size_t i : {5u, 6u}) {
    const double s = c.grid.points()[i].real();
    // t = u^2 removes the t^(1-xi) cusp at the origin; composite Simpson in u.
    auto g = [&](double u) {
      if (u == 0.0) return 0.0;
      const double t = u * u;
      return 2.0 * u * std::exp(-s * t) * oracle::caputo_left(dpsi, xi(t), id, 0.0, t, 1500);
    };
    const int n = 600;
    const double h = std::sqrt(40.0 / s) / n;
    double want = 0.0;
    for (int k = 0; k <= n; ++k) want += (k == 0 || k == n ? 1.0 : (k % 2 ? 4.0 : 2.0)) * g(k * h);
    want *= h / 3.0;
    EXPECT_NEAR(r.variants[0].lhs.values[i].real(), want, 1e-4 * std::abs(want)) << s;
  }
}

TEST(VoCaputoLt, RhsDependsOnT) {
  const ResidualReport r = check_vo_caputo_lt(battery_case("saturating_order"));
  EXPECT_NE(r.variants[0].rhs.values, r.variants[3].rhs.values);
  const VariantResult* best = r.find("min_over_t");
  for (std::size_t i = 0; i < best->residuals.size(); ++i) {
    for (std::size_t k = 0; k + 1 < r.variants.size(); ++k) EXPECT_LE(best->residuals[i], r.variants[k].residuals[i]);
  }
}

TEST(RunSuite, EmptySelection) { EXPECT_TRUE(run_suite(default_battery(), {}).empty()); }

TEST(RunSuite, UnknownIdentity) { EXPECT_THROW(run_suite(default_battery(), {"bogus"}), ValidationError); }

TEST(RunSuite, SingleControl) {
  IdentityCase c = battery_case("control");
  c.checks = {"vo_caputo_lt"};
  const auto reps = run_suite({c}, all_identities());
  ASSERT_EQ(reps.size(), 1u);
  EXPECT_EQ(reps[0].verdict(), Verdict::holds);
}

TEST(RunSuite, OrderingAndErrorCapture) {
  IdentityCase off = make_case("a_off_origin", ramp(), OrderFunction::constant(0.5));
  off.iv = Interval(1.0, 60.0);
  off.t_eval_points = {2.0};
  off.checks = {"phi_scaled", "frozen_order"};
  IdentityCase varying = make_case("b_varying", ramp(), saturating());
  varying.checks = {"caputo_lt", "phi_scaled"};
  const auto reps = run_suite({varying, off}, all_identities());
  ASSERT_EQ(reps.size(), 4u);
  EXPECT_EQ(reps[0].case_name, "a_off_origin");
  EXPECT_EQ(reps[0].identity, "frozen_order");
  EXPECT_FALSE(reps[0].error.has_value());
  EXPECT_EQ(reps[1].identity, "phi_scaled");
  ASSERT_TRUE(reps[1].error.has_value());
  EXPECT_EQ(reps[1].verdict(), Verdict::inconclusive);
  EXPECT_EQ(reps[2].identity, "caputo_lt");
  EXPECT_TRUE(reps[2].error.has_value());
  EXPECT_EQ(reps[3].identity, "phi_scaled");
  EXPECT_EQ(reps[3].verdict(), Verdict::holds);
}

std::vector<ResidualReport> cheap_battery(const QuadConfig& cfg) {
  std::vector<IdentityCase> cases;
  for (const char* n : {"control", "shifted_linear", "phi_square", "phi_double", "saturating_order"}) {
    cases.push_back(battery_case(n));
  }
  return run_suite(cases, all_identities(), cfg);
}

TEST(RunSuite, Deterministic) {
  const auto a = cheap_battery({});
  const auto b = cheap_battery({});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].variants.size(), b[i].variants.size());
    for (std::size_t k = 0; k < a[i].variants.size(); ++k) {
      EXPECT_EQ(a[i].variants[k].lhs.values, b[i].variants[k].lhs.values);
      EXPECT_EQ(a[i].variants[k].rhs.values, b[i].variants[k].rhs.values);
      EXPECT_EQ(a[i].variants[k].residuals, b[i].variants[k].residuals);
    }
  }
}

TEST(RunSuite, TighterTolerancesKeepVerdicts) {
  QuadConfig tight;
  tight.rel_tol /= 10.0;
  tight.abs_tol /= 10.0;
  const auto a = cheap_battery({});
  const auto b = cheap_battery(tight);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < a[i].variants.size(); ++k) {
      const Verdict x = a[i].variants[k].verdict, y = b[i].variants[k].verdict;
      EXPECT_FALSE(x == Verdict::holds && y == Verdict::fails) << a[i].case_name << " " << a[i].identity;
      EXPECT_FALSE(x == Verdict::fails && y == Verdict::holds) << a[i].case_name << " " << a[i].identity;
    }
  }
}

}  // namespace
