#pragma once
// Random smooth test data shared by the unit tests.

#include <cmath>
#include <random>

#include "wlns/spectral.hpp"

namespace testsupport {

/// Sum of Gaussian bumps with random centres, widths in [0.5, 2] and signs.
inline wlns::spectral::Field random_bumps(const wlns::spectral::PeriodicGrid& g, std::mt19937_64& rng, int count = 6,
                                          double spread = 0.25) {
    std::uniform_real_distribution<double> c(-spread * g.L, spread * g.L), w(0.5, 2.0), a(0.5, 1.5);
    std::bernoulli_distribution sgn(0.5);
    wlns::spectral::Field f(g);
    for (int b = 0; b < count; ++b) {
        const double cx = c(rng), cy = c(rng), s = w(rng), amp = a(rng) * (sgn(rng) ? 1.0 : -1.0);
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) {
                const double dx = g.x(i) - cx, dy = g.x(j) - cy;
                f(i, j) += amp * std::exp(-(dx * dx + dy * dy) / (2 * s * s));
            }
    }
    return f;
}

/// Band-limited random field with no mean and no Nyquist content.
inline wlns::spectral::Spectrum random_band(const wlns::spectral::PeriodicGrid& g, std::mt19937_64& rng) {
    auto s = wlns::spectral::truncate(wlns::spectral::forward(random_bumps(g, rng)));
    s(0, 0) = 0.0;
    return s;
}

inline double rel_diff(const wlns::spectral::Field& a, const wlns::spectral::Field& b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        num += (a.v[i] - b.v[i]) * (a.v[i] - b.v[i]);
        den += b.v[i] * b.v[i];
    }
    return std::sqrt(num / den);
}

inline double max_diff(const wlns::spectral::Field& a, const wlns::spectral::Field& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

}  // namespace testsupport
