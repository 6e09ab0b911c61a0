#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"
#include "wlns/spectral.hpp"

using namespace wlns::spectral;
using testsupport::max_diff;
using testsupport::random_band;
using testsupport::random_bumps;

namespace {

constexpr double pi = std::numbers::pi;
const PeriodicGrid g64{64, 2 * pi};

double inner(const Spectrum& a, const Spectrum& b) { return dot(inverse(a), inverse(b)); }

double div_norm(const VecSpectrum& u) { return std::sqrt(l2_norm_sq(divergence(u))); }

}  // namespace

TEST(Spectral, GridContract) {
    EXPECT_THROW((PeriodicGrid{12, 1.0}.validate()), wlns::ContractError);
    EXPECT_THROW((PeriodicGrid{48, 1.0}.validate()), wlns::ContractError);
    EXPECT_THROW((PeriodicGrid{32, 0.0}.validate()), wlns::ContractError);
    EXPECT_NO_THROW((PeriodicGrid{16, 1.0}.validate()));
}

TEST(Spectral, RoundTrip) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    for (int n : {16, 64, 256}) {
        Field f(PeriodicGrid{n, 3.0});
        for (auto& v : f.v) v = nd(rng);
        EXPECT_LT(max_diff(inverse(forward(f)), f), 1e-12 * max_abs(f));
    }
}

TEST(Spectral, ConjugateSymmetryOfRealField) {
    std::mt19937_64 rng(2);
    const auto s = forward(random_bumps(g64, rng));
    for (int i = 1; i < g64.n; ++i)
        for (int j : {0, g64.n / 2}) EXPECT_LT(std::abs(s(i, j) - std::conj(s(g64.n - i, j))), 1e-15);
}

TEST(Spectral, CoefficientsOfCosine) {
    const auto f = sample(g64, [](double x, double) { return std::cos(3 * x); });
    const auto s = forward(f);
    // cos 3x = (e^{3ix} + e^{-3ix})/2; grid origin -pi gives a phase (-1)^3
    EXPECT_NEAR(std::abs(s(3, 0)), 0.5, 1e-14);
    EXPECT_NEAR(std::abs(s(g64.n - 3, 0)), 0.5, 1e-14);
    EXPECT_NEAR(l2_norm_sq(s), l2_norm_sq(f), 1e-12);
}

TEST(Spectral, RieszPlaneWave) {
    // R_1 cos(kx) = sin(kx) for k > 0
    const auto f = sample(g64, [](double x, double) { return std::cos(x); });
    const auto want = sample(g64, [](double x, double) { return std::sin(x); });
    EXPECT_LT(max_diff(inverse(riesz(forward(f), 0)), want), 1e-13);
    EXPECT_LT(max_abs(inverse(riesz(forward(f), 1))), 1e-14);
}

TEST(Spectral, RieszOfConstantIsZero) {
    const Field c(g64, 4.2);
    EXPECT_EQ(max_abs(inverse(riesz(forward(c), 0))), 0.0);
    EXPECT_EQ(max_abs(inverse(riesz(forward(c), 1))), 0.0);
}

TEST(Spectral, RieszSquaresSumToMinusIdentity) {
    std::mt19937_64 rng(3);
    const auto f = random_band(g64, rng);
    const auto s = riesz(riesz(f, 0), 0) + riesz(riesz(f, 1), 1);
    EXPECT_LT(max_diff(inverse(s), inverse(-1.0 * f)), 1e-12 * max_abs(inverse(f)));
}

TEST(Spectral, RieszSkewSymmetry) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 5; ++t) {
        const auto f = random_band(g64, rng), g = random_band(g64, rng);
        for (int j : {0, 1}) {
            const double scale = std::sqrt(l2_norm_sq(f) * l2_norm_sq(g));
            EXPECT_LT(std::abs(inner(riesz(f, j), g) + inner(f, riesz(g, j))), 1e-12 * scale);
        }
    }
}

TEST(Spectral, LerayAnnihilatesGradients) {
    std::mt19937_64 rng(5);
    const auto phi = forward(random_bumps(g64, rng));
    const auto u = gradient(phi);
    const auto p = leray_project(u);
    EXPECT_LT(std::sqrt(l2_norm_sq(p)), 1e-12 * std::sqrt(l2_norm_sq(u)));
}

TEST(Spectral, LerayKeepsDivergenceFree) {
    std::mt19937_64 rng(6);
    const auto u = perp_gradient(forward(random_bumps(g64, rng)));
    EXPECT_LT(div_norm(u), 1e-12 * std::sqrt(l2_norm_sq(u)));
    const auto p = leray_project(u);
    EXPECT_LT(std::sqrt(l2_norm_sq(p[0] - u[0]) + l2_norm_sq(p[1] - u[1])), 1e-12 * std::sqrt(l2_norm_sq(u)));
}

TEST(Spectral, LerayMixedField) {
    // (sin y + sin x, 0): sin x is the gradient of -cos x, so only (sin y, 0) survives
    const VecField u{sample(g64, [](double x, double y) { return std::sin(y) + std::sin(x); }), Field(g64)};
    const auto p = inverse(leray_project(forward(u)));
    EXPECT_LT(max_diff(p[0], sample(g64, [](double, double y) { return std::sin(y); })), 1e-14);
    EXPECT_LT(max_abs(p[1]), 1e-14);
    EXPECT_LT(div_norm(forward(p)), 1e-12);
}

TEST(Spectral, LerayIsOrthogonalIdempotentProjection) {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 5; ++t) {
        const VecSpectrum u{forward(random_bumps(g64, rng)), forward(random_bumps(g64, rng))};
        const auto p = leray_project(u);
        const auto pp = leray_project(p);
        const double n2 = l2_norm_sq(u);
        EXPECT_LT(std::sqrt(l2_norm_sq(pp[0] - p[0]) + l2_norm_sq(pp[1] - p[1])), 1e-12 * std::sqrt(n2));
        EXPECT_LT(div_norm(p), 1e-10 * std::sqrt(n2));
        const double cross = inner(p[0], u[0] - p[0]) + inner(p[1], u[1] - p[1]);
        EXPECT_LT(std::abs(cross), 1e-10 * n2);
    }
}

TEST(Spectral, MollifierKernelUnitMass) {
    const PeriodicGrid g{128, 10.0};
    for (auto shape : {Shape::compact_bump, Shape::gaussian_surrogate})
        for (double eps : {0.01, 0.1, 0.5, 2.0}) {
            const auto k = mollifier_kernel(g, {eps, shape});
            double s = 0.0;
            for (double v : k.v) {
                EXPECT_GE(v, 0.0);
                s += v;
            }
            EXPECT_NEAR(s * g.h() * g.h(), 1.0, 1e-12);
        }
}

TEST(Spectral, MollifierKernelRadiallyDecreasing) {
    const PeriodicGrid g{128, 10.0};
    for (auto shape : {Shape::compact_bump, Shape::gaussian_surrogate}) {
        const auto k = mollifier_kernel(g, {1.0, shape});
        for (int i = 0; i < g.n / 2; ++i) EXPECT_GE(k(i, 0), k(i + 1, 0));
    }
}

TEST(Spectral, MollifyConstant) {
    const Field c(g64, 2.5);
    const auto m = mollify(c, MollifierSpec{0.5, Shape::compact_bump});
    EXPECT_LT(max_diff(m, c), 1e-13);
}

TEST(Spectral, MollifyWidthContract) {
    EXPECT_THROW(mollify(Field(g64, 1.0), MollifierSpec{0.25 * g64.L, Shape::compact_bump}), wlns::ContractError);
    EXPECT_THROW(mollify(Field(g64, 1.0), MollifierSpec{0.0, Shape::compact_bump}), wlns::ContractError);
}

TEST(Spectral, MollifyNearGridSpacingIsIdentity) {
    const PeriodicGrid g{128, 2 * pi};
    const auto f = sample(g, [](double x, double y) { return std::sin(x) * std::cos(2 * y) + 0.3 * std::cos(3 * x); });
    for (auto shape : {Shape::compact_bump, Shape::gaussian_surrogate}) {
        // at or below one cell the compact bump collapses to the discrete delta
        EXPECT_LT(testsupport::rel_diff(mollify(f, MollifierSpec{0.5 * g.h(), shape}), f), 1e-3);
        double prev = 1e300;
        for (double k : {16.0, 8.0, 4.0, 2.0, 1.0, 0.5}) {
            const double e = testsupport::rel_diff(mollify(f, MollifierSpec{k * g.h(), shape}), f);
            EXPECT_LE(e, prev);
            prev = e;
        }
        EXPECT_LT(prev, 1e-3);
    }
}

TEST(Spectral, MollifyPreservesMeanAndMax) {
    std::mt19937_64 rng(8);
    const auto f = random_bumps(g64, rng);
    const auto m = mollify(f, MollifierSpec{0.7, Shape::compact_bump});
    EXPECT_NEAR(forward(m)(0, 0).real(), forward(f)(0, 0).real(), 1e-14);
    EXPECT_LE(max_abs(m), max_abs(f) * (1 + 1e-14));
}

TEST(Spectral, MollifyCommutesWithDerivative) {
    std::mt19937_64 rng(9);
    const auto f = forward(random_bumps(g64, rng));
    const MollifierSpec m{0.4, Shape::compact_bump};
    for (int ax : {0, 1}) {
        const auto a = inverse(derivative(mollify(f, m), ax));
        const auto b = inverse(mollify(derivative(f, ax), m));
        EXPECT_LT(max_diff(a, b), 1e-12 * (1 + max_abs(a)));
    }
}

TEST(Spectral, PressureOfZero) {
    const VecSpectrum z{Spectrum(g64), Spectrum(g64)};
    EXPECT_EQ(max_abs(inverse(pressure_field(z, z))), 0.0);
}

TEST(Spectral, PressureTaylorGreen) {
    const VecField u{sample(g64, [](double x, double y) { return std::cos(x) * std::sin(y); }),
                     sample(g64, [](double x, double y) { return -std::sin(x) * std::cos(y); })};
    const auto us = forward(u);
    const auto p = inverse(pressure_field(us, us));
    const auto want = sample(g64, [](double x, double y) { return -(std::cos(2 * x) + std::cos(2 * y)) / 4; });
    EXPECT_LT(max_diff(p, want), 1e-13);
}

TEST(Spectral, PressureIdentityOnRandomFields) {
    std::mt19937_64 rng(10);
    for (int t = 0; t < 5; ++t) {
        const VecSpectrum u{forward(random_bumps(g64, rng)), forward(random_bumps(g64, rng))};
        const VecSpectrum b{forward(random_bumps(g64, rng)), forward(random_bumps(g64, rng))};
        const auto p = pressure_field(u, b);
        Spectrum dd(g64);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) dd += derivative(derivative(dealiased_product(b[i], u[j]), i), j);
        const auto res = laplacian(p) + dd;
        EXPECT_LT(std::sqrt(l2_norm_sq(res) / l2_norm_sq(p)), 1e-10);
    }
}

TEST(Spectral, DealiasedProductWithConstant) {
    std::mt19937_64 rng(11);
    const auto g = forward(random_bumps(g64, rng));
    const auto p = dealiased_product(forward(Field(g64, 1.0)), g);
    EXPECT_LT(max_diff(inverse(p), inverse(truncate(g))), 1e-13);
}

TEST(Spectral, DealiasedProductOfRetainedModes) {
    // cos 5x * cos 7y and cos 3x * cos 8x stay inside the 2/3 band
    const auto a = forward(sample(g64, [](double x, double) { return std::cos(5 * x); }));
    const auto b = forward(sample(g64, [](double, double y) { return std::cos(7 * y); }));
    EXPECT_LT(max_diff(inverse(dealiased_product(a, b)),
                       sample(g64, [](double x, double y) { return std::cos(5 * x) * std::cos(7 * y); })),
              1e-14);
    const auto c = forward(sample(g64, [](double x, double) { return std::cos(3 * x); }));
    const auto d = forward(sample(g64, [](double x, double) { return std::cos(8 * x); }));
    EXPECT_LT(max_diff(inverse(dealiased_product(c, d)),
                       sample(g64, [](double x, double) { return 0.5 * (std::cos(5 * x) + std::cos(11 * x)); })),
              1e-14);
}

TEST(Spectral, DealiasedProductDropsHighModes) {
    // cos 15x * cos 15x = (1 + cos 30x)/2; mode 30 exceeds n/3
    const auto a = forward(sample(g64, [](double x, double) { return std::cos(15 * x); }));
    EXPECT_LT(max_diff(inverse(dealiased_product(a, a)), Field(g64, 0.5)), 1e-14);
}

TEST(Spectral, DealiasedProductEnergyBound) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 10; ++t) {
        const auto f = random_band(g64, rng), g = random_band(g64, rng);
        const double lhs = std::sqrt(l2_norm_sq(dealiased_product(f, g)));
        EXPECT_LE(lhs, max_abs(inverse(f)) * std::sqrt(l2_norm_sq(g)) * (1 + 1e-12));
    }
}

TEST(Spectral, WeightedNormBasics) {
    const PeriodicGrid g{32, 6.0};
    const auto one = wlns::weights::WeightSpec::constant(2);
    EXPECT_EQ(weighted_norm_sq(Field(g), one), 0.0);
    EXPECT_NEAR(weighted_norm_sq(Field(g, 1.0), one), 36.0, 1e-12);
    EXPECT_THROW(weighted_norm_sq(Field(g, 1.0), wlns::weights::WeightSpec::radial(1.0, 3)), wlns::ContractError);
}

TEST(Spectral, WeightedNormMonotone) {
    std::mt19937_64 rng(13);
    const auto w = wlns::weights::WeightSpec::radial(1.0, 2);
    auto f = random_bumps(g64, rng);
    const double a = weighted_norm_sq(f, w);
    for (auto& v : f.v) v *= 1.1;
    EXPECT_GT(weighted_norm_sq(f, w), a);
}

TEST(Spectral, WeightedNormGaussianMatchesRadialQuadrature) {
    // f = exp(-|x|^2/2), Phi = (1+|x|)^{-2}
    const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [](double r) { return 2 * pi * r * std::exp(-r * r) / ((1 + r) * (1 + r)); }, 0.0, 12.0, 15, 1e-14);
    const PeriodicGrid g{2048, 16.0};
    const auto f = sample(g, [](double x, double y) { return std::exp(-(x * x + y * y) / 2); });
    const double got = weighted_norm_sq(f, wlns::weights::WeightSpec::radial(2.0, 2));
    EXPECT_NEAR(got / oracle, 1.0, 1e-6);
}

TEST(Spectral, SqrtWeightGradientMatchesDifferences) {
    const PeriodicGrid g{64, 8.0};
    const auto w = wlns::weights::WeightSpec::radial(1.0, 2, wlns::weights::Form::one_plus_sq_half);
    const auto grad = sqrt_weight_gradient(g, w);
    auto sq = [&](double x, double y) {
        const std::array<double, 2> p{x, y};
        return std::sqrt(wlns::weights::eval_weight(w, p));
    };
    const double h = 1e-6;
    for (int i : {3, 20, 40}) {
        for (int j : {5, 33, 60}) {
            const double x = g.x(i), y = g.x(j);
            EXPECT_NEAR(grad[0](i, j), (sq(x + h, y) - sq(x - h, y)) / (2 * h), 1e-8);
            EXPECT_NEAR(grad[1](i, j), (sq(x, y + h) - sq(x, y - h)) / (2 * h), 1e-8);
        }
    }
}

namespace {

// ||sqrt(Phi) u||_{H1} against ||sqrt(Phi)u|| + ||sqrt(Phi) div u|| + ||sqrt(Phi) curl u||
double h1_equivalence_ratio(const VecSpectrum& u, const wlns::weights::WeightSpec& w) {
    const auto& g = u[0].grid;
    const auto phi = weight_field(g, w);
    const auto gs = sqrt_weight_gradient(g, w);
    const auto uf = inverse(u);
    double h1 = weighted_norm_sq(uf, phi);
    for (int c = 0; c < 2; ++c) {
        for (int a = 0; a < 2; ++a) {
            const auto du = inverse(derivative(u[c], a));
            Field v(g);
            for (std::size_t i = 0; i < v.v.size(); ++i) v.v[i] = gs[a].v[i] * uf[c].v[i] + std::sqrt(phi.v[i]) * du.v[i];
            h1 += l2_norm_sq(v);
        }
    }
    const double rhs = std::sqrt(weighted_norm_sq(uf, phi)) + std::sqrt(weighted_norm_sq(inverse(divergence(u)), phi)) +
                       std::sqrt(weighted_norm_sq(inverse(curl(u)), phi));
    return std::sqrt(h1) / rhs;
}

}  // namespace

TEST(Spectral, WeightedH1EquivalenceBounded) {
    const PeriodicGrid g{128, 24.0};
    std::mt19937_64 rng(14);
    for (double gamma : {0.0, 1.0, 2.0}) {
        const auto w = wlns::weights::WeightSpec::radial(gamma, 2);
        double lo = 1e300, hi = 0;
        for (int t = 0; t < 10; ++t) {
            const auto psi = forward(random_bumps(g, rng, 6, 0.2));
            const auto phi = forward(random_bumps(g, rng, 6, 0.2));
            const auto sf = perp_gradient(psi), gf = gradient(phi);
            const double mix = t / 9.0;
            const VecSpectrum u{(1 - mix) * sf[0] + mix * gf[0], (1 - mix) * sf[1] + mix * gf[1]};
            const double r = h1_equivalence_ratio(u, w);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        EXPECT_GT(lo, 0.5) << gamma;
        EXPECT_LT(hi, 1.5) << gamma;
    }
}

TEST(Spectral, MollifiedWeightedRatioUniformInEpsilon) {
    const PeriodicGrid g{256, 24.0};
    const std::vector<double> ladder = {2.0, 1.0, 0.5, 0.25, 0.125};
    for (double gamma : {0.0, 1.0, 2.0}) {
        const auto phi = weight_field(g, wlns::weights::WeightSpec::radial(gamma, 2));
        const auto probes = weighted_probes(g, phi, 20, 15);
        const auto worst = mollifier_ratio_ladder(probes, phi, ladder, Shape::compact_bump);
        for (std::size_t i = 1; i < worst.size(); ++i) EXPECT_LE(worst[i], worst[i - 1] * (1 + 1e-12)) << gamma;
        EXPECT_GE(worst.back(), 1.0 - 1e-12);
    }
}

TEST(Spectral, MollifierRatioBelowOneWithoutWeight) {
    // unit-mass non-negative kernel contracts the flat L2 norm
    const PeriodicGrid g{64, 24.0};
    const Field one(g, 1.0);
    const auto probes = weighted_probes(g, one, 10, 3, 0.5, 2.0);
    const std::vector<double> ladder = {2.0, 0.5};
    for (double r : mollifier_ratio_ladder(probes, one, ladder, Shape::gaussian_surrogate)) EXPECT_LE(r, 1.0 + 1e-12);
}
