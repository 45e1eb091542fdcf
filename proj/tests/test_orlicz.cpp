#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cif/errors.hpp"
#include "cif/orlicz.hpp"
#include "cif/quadrature.hpp"
#include "cif/torus_function.hpp"

using namespace cif;

namespace {

constexpr double kPi = std::numbers::pi;

// Scalar roots of M(1/lambda) = c, solved independently at 30 digits.
constexpr double kLambdaUnitMeasure = 1.2567506185377672;
constexpr double kLambdaTorus1 = 6.6228488031497088;

double modular_at_norm(const TorusFunction& f, const QuadratureGrid& grid) {
    const auto samples = grid.sample(f);
    std::vector<double> a;
    for (const auto& s : samples) a.push_back(std::abs(s));
    return orlicz_modular(a, grid.weights(), orlicz_norm(f, grid));
}

} // namespace

TEST(QuadratureGrid, WeightsSumToTorusVolume) {
    for (int d = 1; d <= 3; ++d) {
        const double vol = std::pow(2 * kPi, d);
        EXPECT_NEAR(QuadratureGrid::uniform(d, 16).weight_sum(), vol, 1e-12 * vol);
        EXPECT_NEAR(QuadratureGrid::refined(d, 16).weight_sum(), vol, 1e-12 * vol);
    }
}

TEST(QuadratureGrid, UniformNodesStartAtMinusPi) {
    const auto g = QuadratureGrid::uniform(2, 4);
    const auto first = g.uniform_node(0);
    EXPECT_DOUBLE_EQ(first[0], -kPi);
    EXPECT_DOUBLE_EQ(first[1], -kPi);
    const auto second = g.uniform_node(1);
    EXPECT_DOUBLE_EQ(second[0], -kPi);
    EXPECT_DOUBLE_EQ(second[1], -kPi / 2);
}

TEST(TorusFunction, ExactIntegralsMatchQuadrature) {
    const std::vector<TorusFunction> fs{
        TorusFunction::constant(2, 1.5), TorusFunction::cosine_mode(1, {1}), TorusFunction::shifted_cosine(1, 2.0, {1}),
        TorusFunction::box_indicator(2, {0.0, 0.0}, {kPi, kPi}), TorusFunction::shifted_cosine(3, 1.0, {1, 1, 0})};
    for (const auto& f : fs) {
        const auto exact = f.exact_integral();
        ASSERT_TRUE(exact.has_value());
        const double q = signed_integrals(f, QuadratureGrid::uniform(f.dim(), 256)).total;
        EXPECT_NEAR(q, *exact, 1e-6 * std::max(1.0, std::abs(*exact))) << f.describe().dump();
    }
}

TEST(TorusFunction, LogspikeIntegral) {
    // int over [-pi, pi]^2 of |x|^-1 = 8 pi asinh(1); the cap removes pi * 1e-6
    const double oracle = 8 * kPi * std::asinh(1.0) - kPi * 1e-6;
    EXPECT_NEAR(logspike_integral(2, 1.0, 1e6), oracle, 1e-9 * oracle);
    const auto f = TorusFunction::radial_logspike(2);
    EXPECT_NEAR(signed_integrals(f, QuadratureGrid::for_function(f, 1024)).total, oracle, 1e-2 * oracle);
}

TEST(TorusFunction, FromParamsRejectsUnknownKeysAndFamilies) {
    EXPECT_THROW(TorusFunction::from_params(1, "constant", {{"bogus", "1"}}), InvalidParameter);
    EXPECT_THROW(TorusFunction::from_params(1, "no_such_family", {}), InvalidParameter);
    EXPECT_THROW(TorusFunction::from_params(4, "constant", {}), UnsupportedDimension);
    const auto f = TorusFunction::from_params(1, "shifted_cosine", {{"shift", "2"}});
    EXPECT_NEAR(f.exact_integral().value(), 4 * kPi, 1e-12);
}

TEST(TorusFunction, ScaledKeepsFamily) {
    const auto f = TorusFunction::cosine_mode(1, {1}).scaled(-3.0);
    const double x[1] = {0.0};
    EXPECT_NEAR(f(x).real(), -3.0, 1e-15);
    EXPECT_TRUE(f.has_exact_fourier());
}

TEST(OrliczNorm, UnitMeasureOracle) {
    const std::vector<double> one{1.0};
    EXPECT_NEAR(luxemburg_norm(one, one), kLambdaUnitMeasure, 1e-6);
    EXPECT_NEAR(luxemburg_norm(one, one), kLambdaUnitMeasure, 1e-10);
}

TEST(OrliczNorm, ConstantOnCircle) {
    const auto grid = QuadratureGrid::uniform(1, 256);
    EXPECT_NEAR(orlicz_norm(TorusFunction::constant(1, 1.0), grid), kLambdaTorus1, 1e-9);
    EXPECT_NEAR(orlicz2_norm(TorusFunction::constant(1, 1.0), grid), std::sqrt(kLambdaTorus1), 1e-9);
    EXPECT_DOUBLE_EQ(orlicz_norm(TorusFunction::constant(1, 0.0), grid), 0.0);
    EXPECT_DOUBLE_EQ(orlicz2_norm(TorusFunction::constant(1, 0.0), grid), 0.0);
}

TEST(OrliczNorm, ConstraintSaturation) {
    const auto grid = QuadratureGrid::uniform(2, 64);
    for (const auto& f : {TorusFunction::shifted_cosine(2, 0.5, {1, 2}), TorusFunction::constant(2, 3.0)}) {
        EXPECT_NEAR(modular_at_norm(f, grid), 1.0, 1e-8);
    }
}

TEST(OrliczNorm, Homogeneity) {
    const auto grid = QuadratureGrid::uniform(1, 512);
    const auto f = TorusFunction::shifted_cosine(1, 0.3, {2});
    const double n1 = orlicz_norm(f, grid);
    const double n2 = orlicz2_norm(f, grid);
    for (double c : {-4.0, 0.25, 7.0}) {
        EXPECT_NEAR(orlicz_norm(f.scaled(c), grid), std::abs(c) * n1, 1e-8 * std::abs(c) * n1);
        EXPECT_NEAR(orlicz2_norm(f.scaled(c), grid), std::abs(c) * n2, 1e-8 * std::abs(c) * n2);
    }
}

TEST(OrliczNorm, MonotoneOnSeededSamples) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::vector<double> a(200), b(200), w(200, 2 * kPi / 200);
    for (int t = 0; t < 50; ++t) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = u(rng);
            b[i] = a[i] + u(rng) * (t % 2);
        }
        EXPECT_LE(luxemburg_norm(a, w), luxemburg_norm(b, w) + 1e-10);
    }
}

TEST(OrliczNorm, GridStabilityForSmoothFamily) {
    const auto f = TorusFunction::shifted_cosine(1, 2.0, {1});
    const double a = orlicz_norm(f, QuadratureGrid::uniform(1, 256));
    const double b = orlicz_norm(f, QuadratureGrid::uniform(1, 512));
    EXPECT_NEAR(a, b, 1e-6 * b);
}

TEST(OrliczNorm, RejectsNonFinite) {
    const std::vector<double> bad{1.0, NAN};
    const std::vector<double> w{1.0, 1.0};
    EXPECT_THROW(luxemburg_norm(bad, w), InvalidFunction);
}

TEST(LebesgueNorm, ClosedForms) {
    const auto grid = QuadratureGrid::uniform(1, 256);
    EXPECT_NEAR(lebesgue_norm(TorusFunction::constant(1, 1.0), grid, 2.0), std::sqrt(2 * kPi), 1e-12);
    EXPECT_NEAR(lebesgue_norm(TorusFunction::cosine_mode(1, {1}), grid, 2.0), std::sqrt(kPi), 1e-12);
    EXPECT_DOUBLE_EQ(lebesgue_norm(TorusFunction::constant(1, 0.0), grid, 3.0), 0.0);
    EXPECT_THROW(lebesgue_norm(TorusFunction::constant(1, 1.0), grid, 0.5), InvalidParameter);
}

TEST(Membership, ConstantAndBox) {
    for (const auto& f :
         {TorusFunction::constant(2, 1.0), TorusFunction::box_indicator(2, {0.0, 0.0}, {kPi, kPi})}) {
        const auto r = membership_report(f);
        EXPECT_TRUE(r.l2.member) << r.l2.status;
        EXPECT_TRUE(r.lm.member) << r.lm.status;
        EXPECT_EQ(r.ladder.size(), 4u);
    }
}

TEST(Membership, LogspikeIsInLmButNotL2) {
    const auto r = membership_report(TorusFunction::radial_logspike(2));
    EXPECT_FALSE(r.l2.member);
    EXPECT_EQ(r.l2.status, "diverging");
    EXPECT_TRUE(r.lm.member);
    EXPECT_EQ(r.lm.status, "converging");
    EXPECT_DOUBLE_EQ(r.cap, 1e6);
    const auto j = to_json(r);
    EXPECT_EQ(j.at("family"), "radial_logspike");
    EXPECT_TRUE(j.at("ladder").at(0).contains("res"));
}

TEST(Membership, CustomGridWithNonFiniteSampleFails) {
    std::vector<double> v(16, 1.0);
    v[5] = NAN;
    EXPECT_THROW(membership_report(TorusFunction::custom_grid(1, 16, v)), InvalidFunction);
}
