#pragma once
// Axisymmetric flow without swirl in the eta = omega_theta / r formulation.
//
// Cells sit at r_i = (i + 1/2) dr, z_j = -Z/2 + (j + 1/2) dz (z periodic). The Stokes
// stream function lives on cell corners (r = (p + 1) dr, z_j + dz/2) with psi = 0 on the
// axis and at r = R, so face fluxes built from it are exactly divergence-free.

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "wlns/errors.hpp"
#include "wlns/weights.hpp"

namespace wlns::axisym {

using cplx = std::complex<double>;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct CylGrid {
    int n_r = 128;
    int n_z = 128;
    double R = 8.0;
    double Z = 8.0;

    void validate() const {
        require(n_r >= 8 && n_z >= 8 && n_z % 2 == 0, "axisymmetric grid needs n_r >= 8 and even n_z >= 8");
        require(R > 0.0 && Z > 0.0 && std::isfinite(R) && std::isfinite(Z), "R and Z must be positive");
    }
    double dr() const { return R / n_r; }
    double dz() const { return Z / n_z; }
    double r(int i) const { return (i + 0.5) * dr(); }
    double z(int j) const { return -0.5 * Z + (j + 0.5) * dz(); }
    std::size_t size() const { return static_cast<std::size_t>(n_r) * n_z; }
    bool operator==(const CylGrid& o) const { return n_r == o.n_r && n_z == o.n_z && R == o.R && Z == o.Z; }
};

/// Cell- or corner-indexed array, radial index major.
struct Array2 {
    int n_r = 0, n_z = 0;
    std::vector<double> v;

    Array2() = default;
    Array2(int nr, int nz, double fill = 0.0) : n_r(nr), n_z(nz), v(static_cast<std::size_t>(nr) * nz, fill) {}
    double& operator()(int i, int j) { return v[static_cast<std::size_t>(i) * n_z + j]; }
    double operator()(int i, int j) const { return v[static_cast<std::size_t>(i) * n_z + j]; }
    int wrap(int j) const { return ((j % n_z) + n_z) % n_z; }
};

struct AxiState {
    CylGrid grid;
    double t = 0.0;
    Array2 eta;  // cells
    Array2 psi;  // corners (p, j): r = (p+1) dr, z = z_j + dz/2
    Array2 fr;   // r u_r on radial faces (p, j): r = (p+1) dr, z-cell j
    Array2 gz;   // u_z on axial faces (i, j): r-cell i, z = z_j + dz/2

    double psi_at(int p, int j) const { return p < 0 ? 0.0 : psi(p, psi.wrap(j)); }
    double u_r(int i, int j) const {
        const double outer = fr(i, j), inner = i > 0 ? fr(i - 1, j) : 0.0;
        return 0.5 * (outer + inner) / grid.r(i);
    }
    double u_z(int i, int j) const { return 0.5 * (gz(i, j) + gz(i, gz.wrap(j - 1))); }
    double omega(int i, int j) const { return grid.r(i) * eta(i, j); }
};

// ---------------------------------------------------------------------------
// Transforms along z

namespace detail {

struct ZPlans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

inline ZPlans zplans(int n) {
    static std::mutex mu;
    static std::map<int, ZPlans> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    double* r = fftw_alloc_real(n);
    fftw_complex* c = fftw_alloc_complex(n / 2 + 1);
    ZPlans p{fftw_plan_dft_r2c_1d(n, r, c, FFTW_ESTIMATE | FFTW_UNALIGNED),
             fftw_plan_dft_c2r_1d(n, c, r, FFTW_ESTIMATE | FFTW_UNALIGNED)};
    fftw_free(r);
    fftw_free(c);
    if (!p.r2c || !p.c2r) throw std::runtime_error("FFTW planning failed");
    cache.emplace(n, p);
    return p;
}

/// rows x (n_z/2+1) coefficients, normalized so that the inverse is a plain sum
inline std::vector<cplx> forward_z(const Array2& a, int rows) {
    const int nz = a.n_z, nc = nz / 2 + 1;
    const auto plan = zplans(nz);
    std::vector<cplx> out(static_cast<std::size_t>(rows) * nc);
    std::vector<double> row(nz);
    for (int i = 0; i < rows; ++i) {
        std::copy_n(a.v.begin() + static_cast<std::ptrdiff_t>(i) * nz, nz, row.begin());
        fftw_execute_dft_r2c(plan.r2c, row.data(), reinterpret_cast<fftw_complex*>(out.data() + i * nc));
    }
    for (auto& c : out) c /= nz;
    return out;
}

inline void inverse_z(std::vector<cplx> c, Array2& a, int rows) {
    const int nz = a.n_z, nc = nz / 2 + 1;
    const auto plan = zplans(nz);
    for (int i = 0; i < rows; ++i)
        fftw_execute_dft_c2r(plan.c2r, reinterpret_cast<fftw_complex*>(c.data() + i * nc), a.v.data() + i * nz);
}

/// eigenvalue of the periodic three-point second difference for mode m
inline double dzz_eigen(int m, int nz, double dz) {
    const double s = std::sin(std::numbers::pi * m / nz);
    return -4.0 * s * s / (dz * dz);
}

/// Thomas algorithm, real tridiagonal, complex right-hand side (overwritten).
inline void tridiag(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& c,
                    std::vector<cplx>& d) {
    const std::size_t n = b.size();
    std::vector<double> cp(n);
    double piv = b[0];
    if (std::abs(piv) < 1e-300) throw ConfigError("singular radial system (degenerate grid)", "n_r", 0);
    cp[0] = c[0] / piv;
    d[0] /= piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = b[i] - a[i] * cp[i - 1];
        if (std::abs(piv) < 1e-300) throw ConfigError("singular radial system (degenerate grid)", "n_r", 0);
        cp[i] = c[i] / piv;
        d[i] = (d[i] - a[i] * d[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= cp[i] * d[i + 1];
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Stream function

/// Solves E^2 psi = psi_rr - psi_r / r + psi_zz = -r^2 eta on the corners and rebuilds face velocities.
inline void stream_solve(AxiState& s) {
    const auto& g = s.grid;
    g.validate();
    const int nr = g.n_r, nz = g.n_z, nc = nz / 2 + 1, m = nr - 1;
    const double dr = g.dr(), dz = g.dz();
    Array2 rhs(nr, nz);
    for (int p = 0; p < m; ++p) {
        const double rn = (p + 1) * dr;
        for (int j = 0; j < nz; ++j) {
            const int jp = (j + 1) % nz;
            const double en = 0.25 * (s.eta(p, j) + s.eta(p + 1, j) + s.eta(p, jp) + s.eta(p + 1, jp));
            rhs(p, j) = -rn * rn * en;
        }
    }
    auto hat = detail::forward_z(rhs, nr);
    std::vector<double> a(m), b(m), c(m);
    std::vector<cplx> d(m);
    for (int k = 0; k < nc; ++k) {
        const double lam = detail::dzz_eigen(k, nz, dz);
        for (int p = 0; p < m; ++p) {
            const double rn = (p + 1) * dr;
            a[p] = p > 0 ? rn / (dr * dr * g.r(p)) : 0.0;
            c[p] = p < m - 1 ? rn / (dr * dr * g.r(p + 1)) : 0.0;
            b[p] = -rn / (dr * dr * g.r(p)) - rn / (dr * dr * g.r(p + 1)) + lam;
            d[p] = hat[static_cast<std::size_t>(p) * nc + k];
        }
        detail::tridiag(a, b, c, d);
        for (int p = 0; p < m; ++p) hat[static_cast<std::size_t>(p) * nc + k] = d[p];
        hat[static_cast<std::size_t>(m) * nc + k] = 0.0;
    }
    s.psi = Array2(nr, nz);
    detail::inverse_z(std::move(hat), s.psi, nr);
    for (int j = 0; j < nz; ++j) s.psi(m, j) = 0.0;

    s.fr = Array2(nr, nz);
    s.gz = Array2(nr, nz);
    for (int p = 0; p < nr; ++p)
        for (int j = 0; j < nz; ++j) {
            s.fr(p, j) = -(s.psi_at(p, j) - s.psi_at(p, j - 1)) / dz;
            s.gz(p, j) = (s.psi_at(p, j) - s.psi_at(p - 1, j)) / (g.r(p) * dr);
        }
}

/// Cell divergence (1/r) d_r (r u_r) + d_z u_z of the face velocities.
inline Array2 divergence(const AxiState& s) {
    const auto& g = s.grid;
    Array2 d(g.n_r, g.n_z);
    for (int i = 0; i < g.n_r; ++i)
        for (int j = 0; j < g.n_z; ++j) {
            const double inner = i > 0 ? s.fr(i - 1, j) : 0.0;
            d(i, j) = (s.fr(i, j) - inner) / (g.r(i) * g.dr()) + (s.gz(i, j) - s.gz(i, s.gz.wrap(j - 1))) / g.dz();
        }
    return d;
}

inline double max_speed(const AxiState& s) {
    double m = 0.0;
    for (int i = 0; i < s.grid.n_r; ++i)
        for (int j = 0; j < s.grid.n_z; ++j) m = std::max(m, std::hypot(s.u_r(i, j), s.u_z(i, j)));
    return m;
}

/// max |div| relative to max |u| / dr
inline double divergence_ratio(const AxiState& s) {
    const double u = max_speed(s);
    if (u == 0.0) return 0.0;
    double m = 0.0;
    for (double v : divergence(s).v) m = std::max(m, std::abs(v));
    return m * std::min(s.grid.dr(), s.grid.dz()) / u;
}

inline AxiState make_state(const CylGrid& g, Array2 eta, double t = 0.0) {
    g.validate();
    require(eta.n_r == g.n_r && eta.n_z == g.n_z, "eta does not match the grid");
    AxiState s;
    s.grid = g;
    s.t = t;
    s.eta = std::move(eta);
    stream_solve(s);
    return s;
}

// ---------------------------------------------------------------------------
// The eta operator L3 = d_rr + (3/r) d_r + d_zz

namespace detail {

struct RadialStencil {
    std::vector<double> a, b, c;  // coefficients on eta_{i-1}, eta_i, eta_{i+1}, ghosts folded in
};

/// (1/r) d_r (r d_r) + (2/r) d_r with centred first difference; even at the axis, zero at R.
inline RadialStencil l3_radial(const CylGrid& g) {
    const int n = g.n_r;
    const double dr = g.dr();
    RadialStencil st{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (int i = 0; i < n; ++i) {
        const double ri = g.r(i), rm = i * dr, rp = (i + 1) * dr;
        st.a[i] = rm / (ri * dr * dr) - 1.0 / (ri * dr);
        st.c[i] = rp / (ri * dr * dr) + 1.0 / (ri * dr);
        st.b[i] = -2.0 / (dr * dr);
    }
    st.b[0] += st.a[0];  // eta_{-1} = eta_0
    st.a[0] = 0.0;
    st.b[n - 1] -= st.c[n - 1];  // eta_n = -eta_{n-1}
    st.c[n - 1] = 0.0;
    return st;
}

}  // namespace detail

inline Array2 apply_l3(const CylGrid& g, const Array2& eta) {
    const auto st = detail::l3_radial(g);
    const double dz2 = g.dz() * g.dz();
    Array2 out(g.n_r, g.n_z);
    for (int i = 0; i < g.n_r; ++i)
        for (int j = 0; j < g.n_z; ++j) {
            double v = st.b[i] * eta(i, j);
            if (i > 0) v += st.a[i] * eta(i - 1, j);
            if (i < g.n_r - 1) v += st.c[i] * eta(i + 1, j);
            v += (eta(i, eta.wrap(j + 1)) - 2.0 * eta(i, j) + eta(i, eta.wrap(j - 1))) / dz2;
            out(i, j) = v;
        }
    return out;
}

/// (I - dt L3)^{-1} eta
inline Array2 implicit_diffusion(const CylGrid& g, const Array2& eta, double dt) {
    const auto st = detail::l3_radial(g);
    const int nr = g.n_r, nz = g.n_z, nc = nz / 2 + 1;
    auto hat = detail::forward_z(eta, nr);
    std::vector<double> a(nr), b(nr), c(nr);
    std::vector<cplx> d(nr);
    for (int k = 0; k < nc; ++k) {
        const double lam = detail::dzz_eigen(k, nz, g.dz());
        for (int i = 0; i < nr; ++i) {
            a[i] = -dt * st.a[i];
            c[i] = -dt * st.c[i];
            b[i] = 1.0 - dt * (st.b[i] + lam);
            d[i] = hat[static_cast<std::size_t>(i) * nc + k];
        }
        detail::tridiag(a, b, c, d);
        for (int i = 0; i < nr; ++i) hat[static_cast<std::size_t>(i) * nc + k] = d[i];
    }
    Array2 out(nr, nz);
    detail::inverse_z(std::move(hat), out, nr);
    return out;
}

// ---------------------------------------------------------------------------
// Advection: conservative fluxes through the MAC faces, Koren-limited upwind faces.

namespace detail {

/// Face value from the upwind cell `c`, its upstream neighbour `u` and downstream neighbour `d`.
inline double koren_face(double u, double c, double d) {
    const double back = c - u, fwd = d - c;
    if (back * fwd <= 0.0) return c;
    const double ratio = fwd / back;
    const double phi = std::max(0.0, std::min({2.0 * ratio, (1.0 + 2.0 * ratio) / 3.0, 2.0}));
    return c + 0.5 * phi * back;
}

}  // namespace detail

/// u . grad eta in conservative form
inline Array2 advection(const AxiState& s, const Array2& eta) {
    const auto& g = s.grid;
    const int nr = g.n_r, nz = g.n_z;
    // ghosts: even reflection at the axis, zero beyond R
    const auto at = [&](int i, int j) {
        if (i < 0) return eta(-i - 1, eta.wrap(j));
        if (i >= nr) return 0.0;
        return eta(i, eta.wrap(j));
    };
    Array2 rflux(nr, nz), zflux(nr, nz);
    for (int p = 0; p < nr - 1; ++p)
        for (int j = 0; j < nz; ++j) {
            const double f = s.fr(p, j);
            rflux(p, j) = f * (f >= 0.0 ? detail::koren_face(at(p - 1, j), at(p, j), at(p + 1, j))
                                        : detail::koren_face(at(p + 2, j), at(p + 1, j), at(p, j)));
        }
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nz; ++j) {
            const double w = s.gz(i, j);
            zflux(i, j) = w * (w >= 0.0 ? detail::koren_face(at(i, j - 1), at(i, j), at(i, j + 1))
                                        : detail::koren_face(at(i, j + 2), at(i, j + 1), at(i, j)));
        }
    Array2 out(nr, nz);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nz; ++j) {
            const double inner = i > 0 ? rflux(i - 1, j) : 0.0;
            out(i, j) = (rflux(i, j) - inner) / (g.r(i) * g.dr()) + (zflux(i, j) - zflux(i, zflux.wrap(j - 1))) / g.dz();
        }
    return out;
}

struct AxiStepOptions {
    bool advect = true;
};

/// Advection by SSP-RK3 (velocity re-solved at each stage), then backward-Euler diffusion.
inline AxiState step_axi(const AxiState& s, double dt, AxiStepOptions opt = {}) {
    require(dt > 0.0 && std::isfinite(dt), "time step must be positive");
    AxiState out = s;
    Array2 e = s.eta;
    if (opt.advect) {
        AxiState stage = s;
        const auto euler = [&](const Array2& x, bool fresh) {
            if (fresh) {
                stage.eta = x;
                stream_solve(stage);
            }
            Array2 y = x;
            const Array2 a = advection(stage, x);
            for (std::size_t k = 0; k < y.v.size(); ++k) y.v[k] -= dt * a.v[k];
            return y;
        };
        const Array2 e1 = euler(e, false);
        Array2 e2 = euler(e1, true);
        for (std::size_t k = 0; k < e2.v.size(); ++k) e2.v[k] = 0.75 * e.v[k] + 0.25 * e2.v[k];
        const Array2 e3 = euler(e2, true);
        for (std::size_t k = 0; k < e.v.size(); ++k) e.v[k] = e.v[k] / 3.0 + 2.0 * e3.v[k] / 3.0;
    }
    out.eta = implicit_diffusion(s.grid, e, dt);
    for (double v : out.eta.v)
        if (!std::isfinite(v)) throw BlowUpError("non-finite eta", s.t);
    out.t = s.t + dt;
    if (opt.advect) {
        stream_solve(out);
    } else {
        out.psi = Array2(s.grid.n_r, s.grid.n_z);
        out.fr = out.psi;
        out.gz = out.psi;
    }
    return out;
}

/// CFL bound for the explicit advection
inline double stable_dt(const AxiState& s) {
    const double u = max_speed(s);
    return u == 0.0 ? std::numeric_limits<double>::infinity() : 0.4 * std::min(s.grid.dr(), s.grid.dz()) / u;
}

// ---------------------------------------------------------------------------
// Initial data

struct RingSpec {
    double r0 = 2.0;
    double z0 = 0.0;
    double a = 0.5;
    double amplitude = 10.0;
    bool mirrored = false;  // adds the opposite-signed ring at -z0: a head-on collision
};

/// eta0 = A exp(-((r - r0)^2 + (z - z0)^2) / a^2)
inline AxiState vortex_ring(const CylGrid& g, const RingSpec& ring) {
    g.validate();
    require(ring.a > 0.0, "ring core radius must be positive");
    require(ring.r0 > 2.0 * ring.a, "ring must satisfy r0 > 2a");
    require(ring.r0 + 6.0 * ring.a <= g.R, "ring support too close to the far boundary");
    require(std::abs(ring.z0) + 6.0 * ring.a <= 0.5 * g.Z, "ring support too close to the z period");
    require(!ring.mirrored || std::abs(ring.z0) >= 2.0 * ring.a, "mirrored rings must not overlap");
    Array2 eta(g.n_r, g.n_z);
    for (int i = 0; i < g.n_r; ++i)
        for (int j = 0; j < g.n_z; ++j) {
            const double dr = g.r(i) - ring.r0, dz = g.z(j) - ring.z0, dm = g.z(j) + ring.z0;
            eta(i, j) = ring.amplitude * std::exp(-(dr * dr + dz * dz) / (ring.a * ring.a));
            if (ring.mirrored) eta(i, j) -= ring.amplitude * std::exp(-(dr * dr + dm * dm) / (ring.a * ring.a));
        }
    return make_state(g, std::move(eta));
}

// ---------------------------------------------------------------------------
// Weighted quantities. Norms are full 3D norms (the 2 pi from the angle is included);
// lady_q is the bare meridional integral of eta^2 r.

/// (d_r omega)^2 + (d_z omega)^2 + omega^2 / r^2 per cell, omega = r eta
inline Array2 grad_omega_sq(const AxiState& s) {
    const auto& g = s.grid;
    const int nr = g.n_r;
    const auto om = [&](int i, int j) {
        if (i < 0) return -s.omega(-i - 1, j);  // odd through the axis
        if (i >= nr) return -g.r(i) * s.eta(2 * nr - 1 - i, j);
        return s.omega(i, s.eta.wrap(j));
    };
    Array2 out(nr, g.n_z);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < g.n_z; ++j) {
            const double wr = (om(i + 1, j) - om(i - 1, j)) / (2.0 * g.dr());
            const double wz = (om(i, j + 1) - om(i, j - 1)) / (2.0 * g.dz());
            out(i, j) = wr * wr + wz * wz + s.eta(i, j) * s.eta(i, j);
        }
    return out;
}

/// 2 pi sum w(r_i) f_ij r_i dr dz
inline double volume_integral(const CylGrid& g, const Array2& f, const weights::WeightSpec& w) {
    double acc = 0.0;
    for (int i = 0; i < g.n_r; ++i) {
        const double wr = weights::profile(w, g.r(i)) * g.r(i);
        double row = 0.0;
        for (int j = 0; j < g.n_z; ++j) row += f(i, j);
        acc += wr * row;
    }
    return kTwoPi * acc * g.dr() * g.dz();
}

inline double lady_q(const AxiState& s) {
    double acc = 0.0;
    for (int i = 0; i < s.grid.n_r; ++i)
        for (int j = 0; j < s.grid.n_z; ++j) acc += s.eta(i, j) * s.eta(i, j) * s.grid.r(i);
    return acc * s.grid.dr() * s.grid.dz();
}

/// sum eta r^3 dr dz, proportional to the axial impulse
inline double impulse(const AxiState& s) {
    double acc = 0.0;
    for (int i = 0; i < s.grid.n_r; ++i) {
        const double r = s.grid.r(i);
        for (int j = 0; j < s.grid.n_z; ++j) acc += s.eta(i, j) * r * r * r;
    }
    return acc * s.grid.dr() * s.grid.dz();
}

inline double weighted_energy(const AxiState& s, const weights::WeightSpec& phi) {
    Array2 e(s.grid.n_r, s.grid.n_z);
    for (int i = 0; i < s.grid.n_r; ++i)
        for (int j = 0; j < s.grid.n_z; ++j) e(i, j) = std::pow(s.u_r(i, j), 2) + std::pow(s.u_z(i, j), 2);
    return volume_integral(s.grid, e, phi);
}

inline double weighted_enstrophy(const AxiState& s, const weights::WeightSpec& psi) {
    Array2 e(s.grid.n_r, s.grid.n_z);
    for (int i = 0; i < s.grid.n_r; ++i)
        for (int j = 0; j < s.grid.n_z; ++j) e(i, j) = s.omega(i, j) * s.omega(i, j);
    return volume_integral(s.grid, e, psi);
}

struct AxiRow {
    double t = 0.0;
    double lady_q = 0.0;
    double e_phi_u = 0.0;
    double e_psi_omega = 0.0;
    double e_psi_grad_omega = 0.0;
};

inline constexpr const char* kAxiLedgerHeader = "t,lady_q,e_phi_u,e_psi_omega,e_psi_grad_omega";

struct AxiLedger {
    std::vector<AxiRow> rows;
    double grad_omega0_sq = 0.0;  // unweighted |grad omega_0|^2 integral
    double impulse0 = 0.0;
    bool blew_up = false;
    double last_valid_time = 0.0;
};

inline AxiRow measure(const AxiState& s, const weights::WeightSpec& phi, const weights::WeightSpec& psi) {
    return {s.t, lady_q(s), weighted_energy(s, phi), weighted_enstrophy(s, psi),
            volume_integral(s.grid, grad_omega_sq(s), psi)};
}

struct AxiRunConfig {
    CylGrid grid;
    RingSpec ring;
    double dt = 1e-3;
    double t_end = 0.5;
    weights::WeightSpec phi = weights::WeightSpec::cylindrical(1.0);
    weights::WeightSpec psi = weights::WeightSpec::cylindrical(1.0, weights::Form::one_plus_sq_half);
    int cadence = 10;
    int checkpoint_every = 0;

    int steps() const { return std::max(1, static_cast<int>(std::lround(t_end / dt))); }
    void validate() const {
        grid.validate();
        require(dt > 0.0 && t_end > 0.0, "dt and t_end must be positive");
        require(cadence >= 1, "cadence must be at least 1");
        require(phi.axis_symmetric() && psi.axis_symmetric(), "axisymmetric runs need weights depending on r only");
    }
};

using AxiObserver = std::function<void(const AxiState&, int)>;

/// Records a row at step 0, every `cadence` steps and at the end. A blow-up ends the run early.
inline AxiState run(const AxiRunConfig& cfg, AxiLedger& ledger, const AxiObserver& observe = {}) {
    cfg.validate();
    AxiState s = vortex_ring(cfg.grid, cfg.ring);
    ledger = AxiLedger{};
    ledger.grad_omega0_sq = volume_integral(s.grid, grad_omega_sq(s), weights::WeightSpec::constant(3));
    ledger.impulse0 = impulse(s);
    ledger.rows.push_back(measure(s, cfg.phi, cfg.psi));
    const int n = cfg.steps();
    for (int k = 1; k <= n; ++k) {
        if (cfg.dt > stable_dt(s)) throw ContractError("dt exceeds the advective stability bound");
        try {
            s = step_axi(s, cfg.dt);
        } catch (const BlowUpError& e) {
            ledger.blew_up = true;
            ledger.last_valid_time = e.last_valid_time;
            return s;
        }
        ledger.last_valid_time = s.t;
        if (k % cfg.cadence == 0 || k == n) ledger.rows.push_back(measure(s, cfg.phi, cfg.psi));
        if (observe) observe(s, k);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Verifiers

struct LadyReport {
    bool monotone = false;
    bool bounded = false;      // 2 pi lady_q(0) <= |grad omega_0|^2
    double worst_increase = 0.0;  // max relative step-to-step increase
    int worst_row = -1;
    bool pass() const { return monotone && bounded; }
};

inline LadyReport ladyzhenskaya_monitor(const AxiLedger& ledger, double tol = 1e-6) {
    require(!ledger.rows.empty(), "empty ledger");
    LadyReport rep;
    rep.monotone = true;
    for (std::size_t k = 1; k < ledger.rows.size(); ++k) {
        const double prev = ledger.rows[k - 1].lady_q, cur = ledger.rows[k].lady_q;
        const double rel = prev > 0.0 ? (cur - prev) / prev : cur - prev;
        if (rep.worst_row < 0 || rel > rep.worst_increase) {
            rep.worst_increase = rel;
            rep.worst_row = static_cast<int>(k);
        }
        if (rel > tol) rep.monotone = false;
    }
    rep.bounded = kTwoPi * ledger.rows.front().lady_q <= ledger.grad_omega0_sq * (1.0 + 1e-12);
    return rep;
}

struct Coe1Report {
    double c_min = 0.0;
    bool finite = false;
    int worst_row = -1;
    weights::PairReport pair;
};

/// Smallest C with
///   |sqrt(Psi) w(t)|^2 + int_0^t |sqrt(Psi) grad w|^2
///     <= |sqrt(Psi) w_0|^2 + C int_0^t [(1 + e_u^{1/2} + e_u^{2/3}) e_w + e_w^{3/2} + e_w^3]
/// where e_u = |sqrt(Phi) u|^2 and e_w = |sqrt(Psi) w|^2, time integrals by the trapezoid rule.
inline Coe1Report verify_coe1(const AxiLedger& ledger, const weights::WeightSpec& phi,
                              const weights::WeightSpec& psi) {
    require(ledger.rows.size() >= 2, "ledger needs at least two rows");
    Coe1Report rep;
    rep.pair = weights::check_pair(phi, psi, weights::radial_cloud(3));
    require(rep.pair.pass, "weight pair fails the pair conditions");
    const auto& rows = ledger.rows;
    const auto source = [](const AxiRow& r) {
        const double eu = r.e_phi_u, ew = r.e_psi_omega;
        return (1.0 + std::sqrt(eu) + std::pow(eu, 2.0 / 3.0)) * ew + std::pow(ew, 1.5) + ew * ew * ew;
    };
    double diss = 0.0, src = 0.0;
    rep.finite = true;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const double h = rows[k].t - rows[k - 1].t;
        diss += 0.5 * h * (rows[k].e_psi_grad_omega + rows[k - 1].e_psi_grad_omega);
        src += 0.5 * h * (source(rows[k]) + source(rows[k - 1]));
        const double excess = rows[k].e_psi_omega + diss - rows.front().e_psi_omega;
        if (excess <= 0.0) continue;
        if (!(src > 0.0) || !std::isfinite(src)) {
            rep.finite = false;
            rep.worst_row = static_cast<int>(k);
            continue;
        }
        if (excess / src > rep.c_min) {
            rep.c_min = excess / src;
            rep.worst_row = static_cast<int>(k);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Vortex stretching in Cartesian form: for omega = omega_theta e_theta,
// (omega . grad) omega = -(omega_theta^2 / r) e_r.

using MeridionalField = std::function<double(double r, double z)>;

/// Catmull-Rom interpolation of omega_theta from the cell values.
inline MeridionalField interpolate_omega(const AxiState& s) {
    return [&s](double r, double z) {
        const auto& g = s.grid;
        const int nr = g.n_r;
        const auto om = [&](int i, int j) {
            if (i < 0) return -s.omega(-i - 1, s.eta.wrap(j));
            if (i >= nr) return -g.r(i) * s.eta(2 * nr - 1 - i, s.eta.wrap(j));
            return s.omega(i, s.eta.wrap(j));
        };
        const double xr = r / g.dr() - 0.5, xz = (z + 0.5 * g.Z) / g.dz() - 0.5;
        const int i0 = static_cast<int>(std::floor(xr)), j0 = static_cast<int>(std::floor(xz));
        const double fr = xr - i0, fz = xz - j0;
        const auto cr = [](double t, double a, double b, double c, double d) {
            return b + 0.5 * t * (c - a + t * (2.0 * a - 5.0 * b + 4.0 * c - d + t * (3.0 * (b - c) + d - a)));
        };
        double col[4];
        for (int a = 0; a < 4; ++a) {
            const int i = i0 - 1 + a;
            col[a] = cr(fz, om(i, j0 - 1), om(i, j0), om(i, j0 + 1), om(i, j0 + 2));
        }
        return cr(fr, col[0], col[1], col[2], col[3]);
    };
}

struct StretchingReport {
    double residual = 0.0;  // max |lhs - rhs| / max |rhs| over the shell
    int points = 0;
};

/// Compares central differences of the Cartesian field with the closed form on a torus of
/// meridional radius `radius` about (r_c, z_c), at several azimuths.
inline StretchingReport stretching_identity_check(const MeridionalField& omega, double h, double r_c, double z_c,
                                                  double radius) {
    require(h > 0.0 && radius > 0.0 && r_c - radius > 2.0 * h, "shell must stay clear of the axis");
    const auto field = [&](double x, double y, double z) {
        const double r = std::hypot(x, y), w = omega(r, z);
        return std::array<double, 3>{-w * y / r, w * x / r, 0.0};
    };
    double num = 0.0, den = 0.0;
    int count = 0;
    for (int a = 0; a < 32; ++a) {
        const double al = kTwoPi * a / 32.0;
        const double r = r_c + radius * std::cos(al), z = z_c + radius * std::sin(al);
        for (double th : {0.3, 1.7, 4.1}) {
            const double x = r * std::cos(th), y = r * std::sin(th);
            const auto w = field(x, y, z);
            std::array<double, 3> lhs{0.0, 0.0, 0.0};
            const double p[3] = {x, y, z};
            for (int k = 0; k < 3; ++k) {
                double fwd[3] = {x, y, z}, bwd[3] = {x, y, z};
                fwd[k] = p[k] + h;
                bwd[k] = p[k] - h;
                const auto wf = field(fwd[0], fwd[1], fwd[2]), wb = field(bwd[0], bwd[1], bwd[2]);
                for (int c = 0; c < 3; ++c) lhs[c] += w[k] * (wf[c] - wb[c]) / (2.0 * h);
            }
            const double wt = omega(r, z), mag = wt * wt / r;
            const std::array<double, 3> rhs{-mag * std::cos(th), -mag * std::sin(th), 0.0};
            for (int c = 0; c < 3; ++c) num = std::max(num, std::abs(lhs[c] - rhs[c]));
            den = std::max(den, mag);
            ++count;
        }
    }
    return {den > 0.0 ? num / den : 0.0, count};
}

/// Shell around the vorticity peak of a state, spacing equal to the grid step.
inline StretchingReport stretching_identity_check(const AxiState& s, double radius) {
    int bi = 0, bj = 0;
    for (int i = 0; i < s.grid.n_r; ++i)
        for (int j = 0; j < s.grid.n_z; ++j)
            if (std::abs(s.omega(i, j)) > std::abs(s.omega(bi, bj))) {
                bi = i;
                bj = j;
            }
    return stretching_identity_check(interpolate_omega(s), std::min(s.grid.dr(), s.grid.dz()), s.grid.r(bi),
                                     s.grid.z(bj), radius);
}

}  // namespace wlns::axisym
