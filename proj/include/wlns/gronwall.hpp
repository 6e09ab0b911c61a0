#pragma once
// Nonlinear Gronwall bound: alpha(t) <= A + B int_0^t (alpha + alpha^b) ds keeps alpha <= 3A
// up to T0 = min(T1, 1 / (3^b (A^{b-1} + (B T1)^{b-1}))).

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "wlns/errors.hpp"

namespace wlns::gronwall {

struct GronwallParams {
    double A = 1.0;
    double B = 1.0;
    double b = 1.0;
    double T1 = 1.0;

    void validate() const {
        require(A > 0.0 && std::isfinite(A), "A must be positive");
        require(B >= 0.0 && std::isfinite(B), "B must be non-negative");
        require(b >= 1.0 && std::isfinite(b), "b must be at least 1");
        require(T1 > 0.0 && std::isfinite(T1), "T1 must be positive");
    }
};

inline double t0_bound(const GronwallParams& p) {
    p.validate();
    const double denom = std::pow(3.0, p.b) * (std::pow(p.A, p.b - 1.0) + std::pow(p.B * p.T1, p.b - 1.0));
    return std::min(p.T1, 1.0 / denom);
}

/// Same expression divided by B, which restores the 1/B time scale of the linear part.
inline double t0_bound_corrected(const GronwallParams& p) {
    p.validate();
    if (p.B == 0.0) return p.T1;
    const double denom =
        std::pow(3.0, p.b) * p.B * (std::pow(p.A, p.b - 1.0) + std::pow(p.B * p.T1, p.b - 1.0));
    return std::min(p.T1, 1.0 / denom);
}

struct EnvelopeReport {
    double t0 = 0.0;
    double max_ratio = 1.0;  // max alpha / A on [0, t0]
    bool holds = false;      // alpha <= 3A on [0, t0]
    bool blew_up = false;    // non-finite before t0: a lemma violation
    double crossing_time = std::numeric_limits<double>::infinity();  // first alpha = 3A, inf if none before T1
    double crossing_product = std::numeric_limits<double>::infinity();  // T* 3^b (A^{b-1} + (B T1)^{b-1})
    bool crossing_holds = true;
    bool pass() const { return holds && !blew_up && crossing_holds; }
};

namespace detail {

inline double rhs(const GronwallParams& p, double a) { return p.B * (a + std::pow(a, p.b)); }

inline double rk4(const GronwallParams& p, double a, double h) {
    const double k1 = rhs(p, a), k2 = rhs(p, a + 0.5 * h * k1), k3 = rhs(p, a + 0.5 * h * k2), k4 = rhs(p, a + h * k3);
    return a + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

/// Integrates the extremal trajectory alpha' = B (alpha + alpha^b), alpha(0) = A, with RK4 on
/// [0, t0] using `steps` steps, then continues (coarser) to locate the first crossing of 3A,
/// up to min(T1, 1000 t0).
inline EnvelopeReport verify_envelope(const GronwallParams& p, int steps = 100000, bool corrected = false) {
    require(steps >= 10000, "verify_envelope needs at least 1e4 steps");
    p.validate();
    EnvelopeReport rep;
    rep.t0 = corrected ? t0_bound_corrected(p) : t0_bound(p);
    const double h = rep.t0 / steps, target = 3.0 * p.A;
    double a = p.A, t = 0.0;
    rep.holds = true;
    const double cap = std::min(p.T1, 1e3 * rep.t0);
    const double h_after = std::max(h, (cap - rep.t0) / steps);
    while (t < cap * (1.0 - 1e-12)) {
        const double step = std::min(t < rep.t0 ? std::min(h, rep.t0 - t) : h_after, cap - t);
        const double next = detail::rk4(p, a, step);
        if (!(next < target) && a < target) {
            double lo = 0.0, hi = step;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                (detail::rk4(p, a, mid) < target ? lo : hi) = mid;
            }
            rep.crossing_time = t + hi;
        }
        if (!std::isfinite(next)) {
            if (t + step <= rep.t0 * (1.0 + 1e-12)) {
                rep.blew_up = true;
                rep.holds = false;
            }
            break;
        }
        t += step;
        a = next;
        if (t <= rep.t0 * (1.0 + 1e-12)) {
            rep.max_ratio = std::max(rep.max_ratio, a / p.A);
            if (a > target) rep.holds = false;
        }
        if (std::isfinite(rep.crossing_time) && t >= rep.t0) break;
    }
    if (std::isfinite(rep.crossing_time)) {
        rep.crossing_product = rep.crossing_time * std::pow(3.0, p.b) * (corrected ? p.B : 1.0) *
                               (std::pow(p.A, p.b - 1.0) + std::pow(p.B * p.T1, p.b - 1.0));
        rep.crossing_holds = rep.crossing_product >= 1.0;
    }
    return rep;
}

struct SweepCell {
    GronwallParams params;
    EnvelopeReport report;
};

inline const std::vector<double> kSweepA{0.1, 1.0, 10.0};
inline const std::vector<double> kSweepB{0.1, 1.0, 10.0};
inline const std::vector<double> kSweepExp{1.0, 2.0, 3.0};

inline std::vector<SweepCell> sweep(double T1 = 1.0, int steps = 100000, bool corrected = false) {
    std::vector<SweepCell> out;
    for (double A : kSweepA)
        for (double B : kSweepB)
            for (double b : kSweepExp) {
                const GronwallParams p{A, B, b, T1};
                out.push_back({p, verify_envelope(p, steps, corrected)});
            }
    return out;
}

// ---------------------------------------------------------------------------
// Fitting against a ledger column alpha(t) = |sqrt(Phi) u(t)|^2

struct FitReport {
    double A_fit = 0.0;
    double B_fit = 0.0;
    double t0 = 0.0;
    bool within_3A = false;  // ledger rows with t <= t0 satisfy alpha <= 3 A_fit
    int binding_row = -1;
};

/// row-wise check of alpha_k <= A + B I_k with I_k the trapezoid integral of alpha + alpha^b
inline bool envelope_holds(std::span<const double> alpha, std::span<const double> integral, double A, double B) {
    for (std::size_t k = 0; k < alpha.size(); ++k)
        if (alpha[k] > A + B * integral[k]) return false;
    return true;
}

inline FitReport fit_envelope(std::span<const double> t, std::span<const double> alpha, double b) {
    require(!alpha.empty() && t.size() == alpha.size(), "ledger must be non-empty with matching columns");
    require(b >= 1.0, "b must be at least 1");
    FitReport rep;
    rep.A_fit = alpha[0];
    require(rep.A_fit > 0.0, "alpha(0) must be positive");
    std::vector<double> integral(alpha.size(), 0.0);
    for (std::size_t k = 1; k < alpha.size(); ++k) {
        const double f0 = alpha[k - 1] + std::pow(alpha[k - 1], b), f1 = alpha[k] + std::pow(alpha[k], b);
        integral[k] = integral[k - 1] + 0.5 * (t[k] - t[k - 1]) * (f0 + f1);
    }
    double hi = 0.0;
    for (std::size_t k = 1; k < alpha.size(); ++k) {
        const double excess = alpha[k] - rep.A_fit;
        if (excess > 0.0 && integral[k] > 0.0 && excess / integral[k] > hi) {
            hi = excess / integral[k];
            rep.binding_row = static_cast<int>(k);
        }
    }
    if (hi > 0.0) {
        double lo = 0.0;
        hi *= 2.0;
        while (hi - lo > 1e-6 * hi) {
            const double mid = 0.5 * (lo + hi);
            (envelope_holds(alpha, integral, rep.A_fit, mid) ? hi : lo) = mid;
        }
    }
    rep.B_fit = hi;
    rep.t0 = t0_bound({rep.A_fit, rep.B_fit, b, std::max(t.back(), std::numeric_limits<double>::min())});
    rep.within_3A = true;
    for (std::size_t k = 0; k < alpha.size(); ++k)
        if (t[k] <= rep.t0 && alpha[k] > 3.0 * rep.A_fit) rep.within_3A = false;
    return rep;
}

}  // namespace wlns::gronwall
