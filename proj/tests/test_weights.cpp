#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "wlns/weights.hpp"

using namespace wlns::weights;

namespace {

double at(const WeightSpec& w, std::vector<double> x) { return eval_weight(w, x); }

// Central differences of the closed-form value, independent of profile_d1.
double fd_gradient_norm(const WeightSpec& w, std::vector<double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = 1e-5 * (1.0 + std::abs(x[i]));
        auto p = x, m = x;
        p[i] += h;
        m[i] -= h;
        const double d = (eval_weight(w, p) - eval_weight(w, m)) / (2 * h);
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

TEST(Weights, EvalExamples) {
    const auto w = WeightSpec::radial(2.0, 3);
    EXPECT_DOUBLE_EQ(at(w, {0, 0, 0}), 1.0);
    EXPECT_DOUBLE_EQ(at(w, {1, 0, 0}), 0.25);
    EXPECT_DOUBLE_EQ(at(w, {0.6, 0.8, 0}), 0.25);
    const auto c = WeightSpec::cylindrical(1.0);
    for (double z : {-100.0, 0.0, 3.5, 1e6}) EXPECT_DOUBLE_EQ(at(c, {0, 0, z}), 1.0);
    EXPECT_DOUBLE_EQ(at(c, {3, 4, 7}), 1.0 / 6.0);
}

TEST(Weights, SquareFormMatchesClosedForm) {
    const auto w = WeightSpec::radial(1.0, 2, Form::one_plus_sq_half);
    EXPECT_NEAR(at(w, {3, 4}), 1.0 / std::sqrt(26.0), 1e-15);
}

TEST(Weights, DimensionMismatchIsContractError) {
    const auto w = WeightSpec::radial(1.0, 3);
    EXPECT_THROW(at(w, {1, 2}), wlns::ContractError);
    EXPECT_THROW(at(WeightSpec::constant(2), {1, 2, 3}), wlns::ContractError);
}

TEST(Weights, CylindricalRequiresDim3) {
    auto w = WeightSpec::cylindrical(1.0);
    w.dim = 2;
    EXPECT_THROW(w.validate(), wlns::ContractError);
}

TEST(Weights, ClosedFormGradientMatchesDifferences) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-20, 20);
    for (const auto& w : {WeightSpec::radial(1.5, 3), WeightSpec::radial(2.0, 2, Form::one_plus_sq_half),
                          WeightSpec::cylindrical(1.0), WeightSpec::cylindrical(0.5, Form::one_plus_sq_half)}) {
        for (int k = 0; k < 200; ++k) {
            std::vector<double> x(w.dim);
            for (auto& v : x) v = u(rng);
            EXPECT_NEAR(gradient_norm(w, x), fd_gradient_norm(w, x), 1e-7 * (1 + gradient_norm(w, x)));
        }
    }
}

TEST(Weights, LaplacianMatchesDifferences) {
    // radial second difference, 1D profile in effective dimension m
    for (const auto& w : {WeightSpec::radial(1.0, 3, Form::one_plus_sq_half), WeightSpec::radial(2.0, 2),
                          WeightSpec::cylindrical(1.5)}) {
        const int m = w.effective_dim();
        for (double r : {0.3, 1.0, 4.0, 25.0}) {
            const double h = 1e-4 * r;
            const double fp = profile(w, r + h), f0 = profile(w, r), fm = profile(w, r - h);
            const double lap = (fp - 2 * f0 + fm) / (h * h) + (m - 1) / r * (fp - fm) / (2 * h);
            EXPECT_NEAR(profile_laplacian(w, r), lap, 1e-5 * (1 + std::abs(lap)));
        }
    }
}

TEST(Weights, H1HoldsOnMillionRandomSamples) {
    std::mt19937_64 rng(2024);
    std::lognormal_distribution<double> mag(0.0, 6.0);
    std::normal_distribution<double> dir(0.0, 1.0);
    const std::vector<WeightSpec> specs = {WeightSpec::constant(2), WeightSpec::radial(3.0, 3),
                                           WeightSpec::radial(0.5, 2, Form::one_plus_sq_half),
                                           WeightSpec::cylindrical(2.5)};
    long bad = 0;
    for (int k = 0; k < 1000000; ++k) {
        const auto& w = specs[k % specs.size()];
        std::vector<double> x(w.dim);
        double n = 0;
        for (auto& v : x) {
            v = dir(rng);
            n += v * v;
        }
        const double s = mag(rng) / std::sqrt(n);
        for (auto& v : x) v *= s;
        const double f = eval_weight(w, x);
        if (!(f > 0.0 && f <= 1.0)) ++bad;
    }
    EXPECT_EQ(bad, 0);
}

TEST(Weights, H2Examples) {
    const auto c0 = check_h2(WeightSpec::constant(3), radial_cloud(3));
    EXPECT_TRUE(c0.pass);
    EXPECT_EQ(c0.constant, 0.0);
    const auto g2 = check_h2(WeightSpec::radial(2.0, 3), radial_cloud(3));
    EXPECT_TRUE(g2.pass);
    EXPECT_NEAR(g2.constant, 2.0, 1e-9);
    EXPECT_GE(g2.evidence_scale, 1e3);
    EXPECT_FALSE(check_h2(WeightSpec::radial(2.5, 3), radial_cloud(3)).pass);
}

TEST(Weights, H2ConstantMatchesAnalyticSupremum) {
    // gamma (1+rho)^{gamma/2 - 1} is maximal at rho=0 for gamma <= 2
    for (double g : {0.5, 1.0, 1.5, 2.0})
        EXPECT_NEAR(check_h2(WeightSpec::radial(g, 2), radial_cloud(2)).constant, g, 1e-9);
}

TEST(Weights, H4Examples) {
    const auto grid = default_lambda_grid();
    EXPECT_GE(grid.back(), 1e3);
    const auto c = check_h4(WeightSpec::constant(3), grid, radial_cloud(3));
    EXPECT_TRUE(c.pass);
    EXPECT_DOUBLE_EQ(c.constant, 1.0);
    const auto g2 = check_h4(WeightSpec::radial(2.0, 3), grid, radial_cloud(3));
    EXPECT_TRUE(g2.pass);
    EXPECT_LE(g2.constant, 1.0 + 1e-9);
    EXPECT_FALSE(check_h4(WeightSpec::radial(3.0, 3), grid, radial_cloud(3)).pass);
}

TEST(Weights, GrowthRule) {
    EXPECT_FALSE(grows_without_bound(std::vector<double>{1, 1.01, 1.02, 1.03, 1.04}));
    EXPECT_TRUE(grows_without_bound(std::vector<double>{1, 1.1, 1.2, 1.3, 1.4}));
    EXPECT_FALSE(grows_without_bound(std::vector<double>{1, 2, 3, 2.9, 4}));
}

TEST(Weights, CubeFamilyInvariants) {
    auto f = dyadic_cubes(6);
    EXPECT_NO_THROW(f.validate());
    f.samples_per_cube = 4;
    EXPECT_THROW(f.validate(), wlns::ContractError);
    auto g = dyadic_cubes(6);
    std::swap(g.half_sides[0], g.half_sides[1]);
    EXPECT_THROW(g.validate(), wlns::ContractError);
}

TEST(Weights, AqExamples) {
    const auto cubes = dyadic_cubes(kDefaultScales);
    const auto one = aq_estimate(WeightSpec::constant(3), 2.0, cubes);
    EXPECT_TRUE(one.is_finite());
    EXPECT_NEAR(one.value, 1.0, 1e-12);
    const auto g1 = aq_estimate(WeightSpec::radial(1.0, 2), 2.0, cubes);
    EXPECT_TRUE(g1.is_finite());
    EXPECT_GE(g1.value, 1.0);
    EXPECT_EQ(aq_estimate(WeightSpec::radial(3.0, 3), 2.0, cubes).status, AqStatus::divergent);
}

TEST(Weights, AqOfConstantPowerCentersIsExact) {
    // Jensen: any cube average product is >= 1, with equality for constants
    const auto cubes = dyadic_cubes(8);
    for (double q : {1.2, 1.5, 3.0}) EXPECT_NEAR(aq_estimate(WeightSpec::radial(0.0, 2), q, cubes).value, 1.0, 1e-12);
}

TEST(Weights, AqMonotoneInFamily) {
    for (const auto& w : {WeightSpec::radial(1.0, 2), WeightSpec::radial(1.5, 3), WeightSpec::cylindrical(1.0)}) {
        double prev = 0.0;
        for (int s : {12, 14, 16, 20}) {
            const auto e = aq_estimate(w, 2.0, dyadic_cubes(s));
            ASSERT_TRUE(e.is_finite());
            EXPECT_GE(e.value, prev);
            prev = e.value;
        }
    }
}

TEST(Weights, AqCensusMatchesPowerCriterion) {
    const auto cubes = dyadic_cubes(kDefaultScales);
    for (int d : {2, 3})
        for (double g : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0})
            for (double q : {1.2, 1.5, 2.0}) {
                const auto e = aq_estimate(WeightSpec::radial(g, d), q, cubes);
                EXPECT_EQ(e.is_finite(), power_weight_in_aq(g, d, q)) << "d=" << d << " gamma=" << g << " q=" << q;
            }
}

TEST(Weights, AdaptedExamples) {
    const auto rs = default_r_scan();
    EXPECT_TRUE(check_adapted(WeightSpec::radial(1.0, 2), rs).adapted);
    EXPECT_TRUE(check_adapted(WeightSpec::radial(2.0, 3), rs).adapted);
    const auto cyl = check_adapted(WeightSpec::cylindrical(2.0), rs);
    EXPECT_FALSE(cyl.adapted);
    EXPECT_FALSE(cyl.h3.pass);
    EXPECT_TRUE(cyl.h2.pass);
    EXPECT_TRUE(cyl.h4.pass);
}

TEST(Weights, AdaptedRejectsBadScan) {
    EXPECT_THROW(check_adapted(WeightSpec::radial(1.0, 2), std::vector<double>{2.5}), wlns::ContractError);
}

TEST(Weights, PairExamples) {
    const auto cloud = radial_cloud(3);
    const auto phi = WeightSpec::cylindrical(1.5);
    const auto psi = WeightSpec::cylindrical(1.0, Form::one_plus_sq_half);
    EXPECT_TRUE(check_pair(phi, psi, cloud).pass);
    const auto t3 = WeightSpec::cylindrical(1.0);
    EXPECT_TRUE(check_pair(t3, t3, cloud).pass);
    const auto bad = check_pair(WeightSpec::cylindrical(1.0), WeightSpec::cylindrical(1.5, Form::one_plus_sq_half), cloud);
    EXPECT_FALSE(bad.ordering);
    EXPECT_FALSE(bad.pass);
}

TEST(Weights, PairRejectsNonCylindrical) {
    EXPECT_THROW(check_pair(WeightSpec::radial(1.0, 3), WeightSpec::cylindrical(1.0), radial_cloud(3)),
                 wlns::ContractError);
}

TEST(Weights, SelfPairConsistentWithAdapted) {
    const auto cloud = radial_cloud(3);
    for (double g : {0.5, 1.0, 1.5}) {
        const auto w = WeightSpec::cylindrical(g);
        ASSERT_TRUE(check_adapted(w, default_r_scan()).adapted);
        EXPECT_TRUE(check_pair(w, w, cloud).pass) << g;
    }
}

TEST(Weights, Lemma4Examples) {
    auto a = lemma4_bound(WeightSpec::constant(3), 0.0);
    EXPECT_DOUBLE_EQ(a.c3, 1.0);
    EXPECT_TRUE(a.verified);
    auto b = lemma4_bound(WeightSpec::radial(2.0, 3), 2.0);
    EXPECT_DOUBLE_EQ(b.c3, 4.0);
    EXPECT_TRUE(b.verified);
    auto c = lemma4_bound(WeightSpec::radial(1.0, 3), 1.0);
    EXPECT_DOUBLE_EQ(c.c3, 2.25);
    EXPECT_TRUE(c.verified);
}

TEST(Weights, Lemma4HoldsWheneverH2Passes) {
    for (int d : {2, 3})
        for (double g : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5})
            for (auto form : {Form::one_plus_abs, Form::one_plus_sq_half}) {
                const auto w = WeightSpec::radial(g, d, form);
                const auto h2 = check_h2(w, radial_cloud(d));
                if (h2.pass) {
                    EXPECT_TRUE(lemma4_bound(w, h2.constant).verified) << d << " " << g;
                }
            }
}

TEST(Weights, Lemma2Examples) {
    const auto cubes = dyadic_cubes(kDefaultScales);
    const auto w1 = WeightSpec::radial(1.0, 2);
    const auto id = lemma2_power(w1, 2.0, 1.0, cubes);
    EXPECT_DOUBLE_EQ(id.p, 2.0);
    EXPECT_TRUE(id.finite);
    const auto half = lemma2_power(w1, 2.0, 0.5, cubes);
    EXPECT_DOUBLE_EQ(half.p, 1.5);
    EXPECT_TRUE(half.finite);
    const auto w = WeightSpec::radial(2.0, 3);
    const auto rep = check_adapted(w, default_r_scan());
    const double r = rep.h3_exponent;
    ASSERT_GT(r, 1.0);
    const auto l2 = lemma2_power(w.pow(r), r, 1.0 / r, cubes);
    EXPECT_NEAR(l2.p, 2.0 - 1.0 / r, 1e-15);
    EXPECT_LT(l2.p, 2.0);
    EXPECT_TRUE(l2.finite);
}

TEST(Weights, ComputeConstants) {
    const std::vector<double> qs = {1.5, 2.0};
    const auto k = compute_constants(WeightSpec::radial(2.0, 3), qs, dyadic_cubes(12));
    EXPECT_NEAR(k.c1, 2.0, 1e-9);
    EXPECT_NEAR(k.c3, 4.0, 1e-8);
    EXPECT_EQ(k.aq_table.size(), 2u);
    for (const auto& [q, e] : k.aq_table) {
        EXPECT_TRUE(e.is_finite());
        EXPECT_GE(e.value, 0.0);
    }
}
