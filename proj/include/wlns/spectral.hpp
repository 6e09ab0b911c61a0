#pragma once
// Periodic 2D grid transforms and multipliers on [-L/2, L/2)^2.
//
// Coefficients are normalized so that f(x_i, y_j) = sum_k c_k exp(i k.(x - x_0)),
// stored half-complex (last axis keeps 0..n/2). Fields are plain values; every
// operation returns a new object.

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstring>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <numbers>
#include <span>
#include <vector>

#include "wlns/errors.hpp"
#include "wlns/weights.hpp"

namespace wlns::spectral {

using cplx = std::complex<double>;

struct PeriodicGrid {
    int n = 64;
    double L = 2.0 * std::numbers::pi;

    void validate() const {
        require(n >= 16 && (n & (n - 1)) == 0, "grid size must be a power of two >= 16");
        require(L > 0.0 && std::isfinite(L), "box length must be positive");
    }
    double h() const { return L / n; }
    double x(int i) const { return -0.5 * L + i * h(); }
    int nc() const { return n / 2 + 1; }
    std::size_t size() const { return static_cast<std::size_t>(n) * n; }
    std::size_t csize() const { return static_cast<std::size_t>(n) * nc(); }
    /// signed integer wavenumber for storage index i along a full axis
    int mode(int i) const { return i <= n / 2 ? i : i - n; }
    double k(int i) const { return 2.0 * std::numbers::pi * mode(i) / L; }
    /// first-derivative wavenumber: Nyquist dropped so odd multipliers keep fields real
    double kd(int i) const { return mode(i) == n / 2 ? 0.0 : k(i); }
    bool operator==(const PeriodicGrid& o) const { return n == o.n && L == o.L; }
};

struct Field {
    PeriodicGrid grid;
    std::vector<double> v;

    Field() = default;
    explicit Field(const PeriodicGrid& g, double fill = 0.0) : grid(g), v(g.size(), fill) { g.validate(); }
    double& operator()(int i, int j) { return v[static_cast<std::size_t>(i) * grid.n + j]; }
    double operator()(int i, int j) const { return v[static_cast<std::size_t>(i) * grid.n + j]; }
};

struct Spectrum {
    PeriodicGrid grid;
    std::vector<cplx> c;

    Spectrum() = default;
    explicit Spectrum(const PeriodicGrid& g) : grid(g), c(g.csize()) { g.validate(); }
    cplx& operator()(int i, int j) { return c[static_cast<std::size_t>(i) * grid.nc() + j]; }
    cplx operator()(int i, int j) const { return c[static_cast<std::size_t>(i) * grid.nc() + j]; }

    Spectrum& operator+=(const Spectrum& o) {
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
        return *this;
    }
    Spectrum& operator*=(double s) {
        for (auto& z : c) z *= s;
        return *this;
    }
};

inline Spectrum operator+(Spectrum a, const Spectrum& b) { return a += b; }
inline Spectrum operator-(Spectrum a, const Spectrum& b) {
    for (std::size_t i = 0; i < a.c.size(); ++i) a.c[i] -= b.c[i];
    return a;
}
inline Spectrum operator*(double s, Spectrum a) { return a *= s; }

using VecField = std::array<Field, 2>;
using VecSpectrum = std::array<Spectrum, 2>;

// ---------------------------------------------------------------------------
// FFTW plans, one pair per size; planning is serialized, execution is not.

namespace detail {

struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

inline PlanPair plans_for(int n) {
    static std::mutex mu;
    static std::map<int, PlanPair> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    const std::size_t nc = static_cast<std::size_t>(n) * (n / 2 + 1);
    double* r = fftw_alloc_real(static_cast<std::size_t>(n) * n);
    fftw_complex* z = fftw_alloc_complex(nc);
    PlanPair p;
    p.r2c = fftw_plan_dft_r2c_2d(n, n, r, z, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.c2r = fftw_plan_dft_c2r_2d(n, n, z, r, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(r);
    fftw_free(z);
    if (!p.r2c || !p.c2r) throw std::runtime_error("FFTW planning failed");
    cache.emplace(n, p);
    return p;
}

}  // namespace detail

inline Spectrum forward(const Field& f) {
    Spectrum s(f.grid);
    std::vector<double> in = f.v;
    fftw_execute_dft_r2c(detail::plans_for(f.grid.n).r2c, in.data(), reinterpret_cast<fftw_complex*>(s.c.data()));
    const double norm = 1.0 / static_cast<double>(f.grid.size());
    for (auto& z : s.c) z *= norm;
    return s;
}

inline Field inverse(const Spectrum& s) {
    Field f(s.grid);
    std::vector<cplx> in = s.c;  // c2r overwrites its input
    fftw_execute_dft_c2r(detail::plans_for(s.grid.n).c2r, reinterpret_cast<fftw_complex*>(in.data()), f.v.data());
    return f;
}

inline VecSpectrum forward(const VecField& u) { return {forward(u[0]), forward(u[1])}; }
inline VecField inverse(const VecSpectrum& u) { return {inverse(u[0]), inverse(u[1])}; }

inline Field sample(const PeriodicGrid& g, const std::function<double(double, double)>& fn) {
    Field f(g);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) f(i, j) = fn(g.x(i), g.x(j));
    return f;
}

/// Applies m(kx_index, ky_index) to every stored coefficient.
template <class M>
Spectrum apply(const Spectrum& s, M&& m) {
    Spectrum out(s.grid);
    const int n = s.grid.n, nc = s.grid.nc();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < nc; ++j) out(i, j) = m(i, j) * s(i, j);
    return out;
}

// ---------------------------------------------------------------------------
// Multipliers

inline Spectrum derivative(const Spectrum& s, int axis) {
    const auto& g = s.grid;
    return apply(s, [&](int i, int j) { return cplx(0.0, axis == 0 ? g.kd(i) : g.kd(j)); });
}

inline Spectrum laplacian(const Spectrum& s) {
    const auto& g = s.grid;
    return apply(s, [&](int i, int j) { return cplx(-(g.k(i) * g.k(i) + g.k(j) * g.k(j)), 0.0); });
}

/// Multiplier -i k_j/|k|; the k = 0 mode maps to zero.
inline Spectrum riesz(const Spectrum& s, int axis) {
    const auto& g = s.grid;
    return apply(s, [&](int i, int j) {
        const double kx = g.kd(i), ky = g.kd(j), kk = std::hypot(kx, ky);
        if (kk == 0.0) return cplx(0.0);
        return cplx(0.0, -(axis == 0 ? kx : ky) / kk);
    });
}

inline VecSpectrum leray_project(const VecSpectrum& u) {
    const auto& g = u[0].grid;
    require(u[1].grid == g, "components must share a grid");
    VecSpectrum out{Spectrum(g), Spectrum(g)};
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.nc(); ++j) {
            const double kx = g.kd(i), ky = g.kd(j), k2 = kx * kx + ky * ky;
            const cplx a = u[0](i, j), b = u[1](i, j);
            if (k2 == 0.0) {
                out[0](i, j) = a;
                out[1](i, j) = b;
                continue;
            }
            const cplx dot = (kx * a + ky * b) / k2;
            out[0](i, j) = a - kx * dot;
            out[1](i, j) = b - ky * dot;
        }
    return out;
}

inline Spectrum divergence(const VecSpectrum& u) { return derivative(u[0], 0) + derivative(u[1], 1); }

/// scalar vorticity d_x u_y - d_y u_x
inline Spectrum curl(const VecSpectrum& u) { return derivative(u[1], 0) - derivative(u[0], 1); }

inline VecSpectrum gradient(const Spectrum& f) { return {derivative(f, 0), derivative(f, 1)}; }

/// Velocity (-d_y psi, d_x psi) from a stream function.
inline VecSpectrum perp_gradient(const Spectrum& psi) { return {-1.0 * derivative(psi, 1), derivative(psi, 0)}; }

// ---------------------------------------------------------------------------
// 2/3 rule

inline bool retained(const PeriodicGrid& g, int i, int j) {
    const int cut = g.n / 3;
    return std::abs(g.mode(i)) <= cut && std::abs(g.mode(j)) <= cut;
}

inline Spectrum truncate(const Spectrum& s) {
    return apply(s, [&](int i, int j) { return retained(s.grid, i, j) ? 1.0 : 0.0; });
}

inline VecSpectrum truncate(const VecSpectrum& u) { return {truncate(u[0]), truncate(u[1])}; }

inline Spectrum dealiased_product(const Spectrum& f, const Spectrum& g) {
    require(f.grid == g.grid, "factors must share a grid");
    Field a = inverse(truncate(f));
    const Field b = inverse(truncate(g));
    for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] *= b.v[i];
    return truncate(forward(a));
}

// ---------------------------------------------------------------------------
// Mollification

enum class Shape { compact_bump, gaussian_surrogate };

struct MollifierSpec {
    double epsilon = 0.1;
    Shape shape = Shape::compact_bump;
};

inline std::string to_string(Shape s) { return s == Shape::compact_bump ? "compact_bump" : "gaussian_surrogate"; }

/// Radial profile before normalization. The Gaussian surrogate uses sigma = eps/2.
inline double kernel_profile(Shape shape, double rho_over_eps) {
    if (shape == Shape::gaussian_surrogate) return std::exp(-2.0 * rho_over_eps * rho_over_eps);
    const double s = rho_over_eps * rho_over_eps;
    return s < 1.0 ? std::exp(-1.0 / (1.0 - s)) : 0.0;
}

/// Kernel sampled at wrapped offsets, scaled so that sum K h^2 = 1.
inline Field mollifier_kernel(const PeriodicGrid& g, const MollifierSpec& m) {
    require(m.epsilon > 0.0, "mollifier width must be positive");
    require(m.epsilon < 0.25 * g.L, "mollifier width must be below L/4");
    Field k(g);
    const double h = g.h();
    double mass = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const double r = std::hypot(g.mode(i) * h, g.mode(j) * h);
            mass += (k(i, j) = kernel_profile(m.shape, r / m.epsilon));
        }
    if (mass == 0.0) {  // width below the origin's neighbourhood: discrete delta
        k(0, 0) = 1.0;
        mass = 1.0;
    }
    const double scale = 1.0 / (mass * h * h);
    for (auto& v : k.v) v *= scale;
    return k;
}

/// Transform-space multiplier of the discrete convolution with the kernel.
inline Spectrum mollifier_symbol(const PeriodicGrid& g, const MollifierSpec& m) {
    Spectrum s = forward(mollifier_kernel(g, m));
    return (static_cast<double>(g.size()) * g.h() * g.h()) * s;
}

inline Spectrum mollify(const Spectrum& f, const Spectrum& symbol) {
    require(f.grid == symbol.grid, "symbol grid mismatch");
    Spectrum out(f.grid);
    for (std::size_t i = 0; i < f.c.size(); ++i) out.c[i] = f.c[i] * symbol.c[i];
    return out;
}

inline Spectrum mollify(const Spectrum& f, const MollifierSpec& m) { return mollify(f, mollifier_symbol(f.grid, m)); }
inline Field mollify(const Field& f, const MollifierSpec& m) { return inverse(mollify(forward(f), m)); }

// ---------------------------------------------------------------------------

/// p = sum_ij R_i R_j (b_i u_j), with dealiased products.
inline Spectrum pressure_field(const VecSpectrum& u, const VecSpectrum& b) {
    const auto& g = u[0].grid;
    Spectrum p(g);
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) p += riesz(riesz(dealiased_product(b[a], u[c]), a), c);
    return p;
}

inline double dot(const Field& f, const Field& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.v.size(); ++i) s += f.v[i] * g.v[i];
    return s * f.grid.h() * f.grid.h();
}

inline double l2_norm_sq(const Field& f) { return dot(f, f); }
inline double l2_norm_sq(const VecField& u) { return dot(u[0], u[0]) + dot(u[1], u[1]); }

inline double max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.v) m = std::max(m, std::abs(v));
    return m;
}

/// Parseval form of the discrete L2 norm squared.
inline double l2_norm_sq(const Spectrum& s) {
    const auto& g = s.grid;
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.nc(); ++j) {
            const double w = (j == 0 || j == g.n / 2) ? 1.0 : 2.0;
            acc += w * std::norm(s(i, j));
        }
    return acc * g.L * g.L;
}

inline double l2_norm_sq(const VecSpectrum& u) { return l2_norm_sq(u[0]) + l2_norm_sq(u[1]); }

/// Weight sampled at the grid nodes (no periodization).
inline Field weight_field(const PeriodicGrid& g, const weights::WeightSpec& w) {
    require(w.dim == 2, "grid weights must be two-dimensional");
    w.validate();
    return sample(g, [&](double x, double y) {
        const std::array<double, 2> p{x, y};
        return weights::eval_weight(w, p);
    });
}

/// Midpoint sum of |f|^2 Phi over the cells.
inline double weighted_norm_sq(const Field& f, const Field& phi) {
    require(f.grid == phi.grid, "weight grid mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.v.size(); ++i) s += f.v[i] * f.v[i] * phi.v[i];
    return s * f.grid.h() * f.grid.h();
}

inline double weighted_norm_sq(const VecField& u, const Field& phi) {
    return weighted_norm_sq(u[0], phi) + weighted_norm_sq(u[1], phi);
}

inline double weighted_norm_sq(const Field& f, const weights::WeightSpec& w) {
    return weighted_norm_sq(f, weight_field(f.grid, w));
}

inline double weighted_norm_sq(const VecField& u, const weights::WeightSpec& w) {
    return weighted_norm_sq(u, weight_field(u[0].grid, w));
}

/// Gradient of sqrt(Phi) in closed form, sampled at the nodes.
inline VecField sqrt_weight_gradient(const PeriodicGrid& g, const weights::WeightSpec& w) {
    require(w.dim == 2, "grid weights must be two-dimensional");
    VecField out{Field(g), Field(g)};
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const double x = g.x(i), y = g.x(j), rho = std::hypot(x, y);
            if (rho == 0.0) continue;
            const double f = weights::profile(w, rho);
            const double d = 0.5 * weights::profile_d1(w, rho) / std::sqrt(f);
            out[0](i, j) = d * x / rho;
            out[1](i, j) = d * y / rho;
        }
    return out;
}

// ---------------------------------------------------------------------------
// Weighted mollifier bound: ratio ||sqrt(Phi)(theta_eps * f)|| / ||sqrt(Phi) f||.

/// Probe fields g / sqrt(Phi) with g a sum of smooth Gaussian bumps; the first probe
/// is the constant field, which attains ratio 1 for every width.
inline std::vector<Field> weighted_probes(const PeriodicGrid& g, const Field& phi, int count, std::uint64_t seed,
                                          double min_width = 2.0, double max_width = 4.0) {
    require(count >= 1, "need at least one probe");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> centre(-0.3 * g.L, 0.3 * g.L), width(min_width, max_width), amp(0.5, 1.5);
    std::vector<Field> out{Field(g, 1.0)};
    while (static_cast<int>(out.size()) < count) {
        Field f(g);
        for (int b = 0; b < 4; ++b) {
            const double cx = centre(rng), cy = centre(rng), s = width(rng);
            const double a = amp(rng) * ((rng() & 1) ? 1.0 : -1.0);
            for (int i = 0; i < g.n; ++i)
                for (int j = 0; j < g.n; ++j) {
                    const double dx = g.x(i) - cx, dy = g.x(j) - cy;
                    f(i, j) += a * std::exp(-(dx * dx + dy * dy) / (2 * s * s)) / std::sqrt(phi(i, j));
                }
        }
        out.push_back(std::move(f));
    }
    return out;
}

/// Largest ratio over the probes, one entry per width.
inline std::vector<double> mollifier_ratio_ladder(const std::vector<Field>& probes, const Field& phi,
                                                  std::span<const double> eps_ladder, Shape shape) {
    std::vector<double> worst;
    for (double eps : eps_ladder) {
        const auto sym = mollifier_symbol(phi.grid, {eps, shape});
        double m = 0.0;
        for (const auto& f : probes)
            m = std::max(m, std::sqrt(weighted_norm_sq(inverse(mollify(forward(f), sym)), phi) / weighted_norm_sq(f, phi)));
        worst.push_back(m);
    }
    return worst;
}

}  // namespace wlns::spectral
