#pragma once
// Mollified Navier-Stokes on the periodic square, viscosity 1.
//
// State lives in transform space, truncated to the 2/3 band. Steps use an exact heat
// factor and classical RK4 on N(u) = -P[(b.grad) u], b = theta_eps * u (b = u for eps = 0).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wlns/errors.hpp"
#include "wlns/spectral.hpp"
#include "wlns/weights.hpp"

namespace wlns::solver2d {

using spectral::Field;
using spectral::PeriodicGrid;
using spectral::Shape;
using spectral::Spectrum;
using spectral::VecField;
using spectral::VecSpectrum;
using cplx_t = std::complex<double>;

struct State {
    PeriodicGrid grid;
    double t = 0.0;
    VecSpectrum u;
    double epsilon = 0.0;
    Shape shape = Shape::compact_bump;

    VecField velocity() const { return spectral::inverse(u); }
};

inline State make_state(const VecField& u, double epsilon = 0.0, Shape shape = Shape::compact_bump) {
    State s;
    s.grid = u[0].grid;
    s.u = spectral::truncate(spectral::leray_project(spectral::forward(u)));
    s.epsilon = epsilon;
    s.shape = shape;
    return s;
}

inline double divergence_ratio(const State& s) {
    const double n = spectral::l2_norm_sq(s.u);
    if (n == 0.0) return 0.0;
    return std::sqrt(spectral::l2_norm_sq(spectral::divergence(s.u)) / n);
}

/// sum over components and axes of ||d_a u_c||^2
inline double grad_norm_sq(const VecSpectrum& u) {
    const auto& g = u[0].grid;
    double acc = 0.0;
    for (const auto& c : u)
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.nc(); ++j) {
                const double w = (j == 0 || j == g.n / 2) ? 1.0 : 2.0;
                acc += w * (g.kd(i) * g.kd(i) + g.kd(j) * g.kd(j)) * std::norm(c(i, j));
            }
    return acc * g.L * g.L;
}

// ---------------------------------------------------------------------------
// Initial data

enum class InitKind { taylor_green, random_divfree, file };

struct InitParams {
    InitKind kind = InitKind::taylor_green;
    double amplitude = 1.0;       // max |u| after normalization (random_divfree)
    double slope = 1.5;           // stream-function spectrum ~ |k|^{-slope}
    double envelope = 0.0;        // Gaussian envelope width; 0 picks L/14
    double centre_x = 0.0;        // envelope centre
    double centre_y = 0.0;
    double cutoff_radius = 0.0;   // optional radial cutoff applied before projection
    std::string path;             // text field for InitKind::file
};

inline InitKind parse_init_kind(const std::string& s) {
    if (s == "taylor_green") return InitKind::taylor_green;
    if (s == "random_divfree") return InitKind::random_divfree;
    if (s == "file") return InitKind::file;
    throw ContractError("unknown initial data kind: " + s);
}

inline std::string to_string(InitKind k) {
    switch (k) {
        case InitKind::taylor_green: return "taylor_green";
        case InitKind::random_divfree: return "random_divfree";
        case InitKind::file: return "file";
    }
    return "?";
}

/// Text layout: first data line "n L", then n*n lines "ux uy" in row-major order; '#' starts a comment.
inline VecField load_velocity_text(const std::string& path, const PeriodicGrid& expect) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open velocity file " + path);
    std::string line;
    int lineno = 0;
    auto next = [&](std::istringstream& ss) {
        while (std::getline(in, line)) {
            ++lineno;
            const auto h = line.find('#');
            if (h != std::string::npos) line.erase(h);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            ss = std::istringstream(line);
            return true;
        }
        return false;
    };
    std::istringstream ss;
    if (!next(ss)) throw IoError(path + ": empty velocity file");
    int n = 0;
    double L = 0.0;
    if (!(ss >> n >> L)) throw IoError(path + ":" + std::to_string(lineno) + ": expected header 'n L'");
    if (n != expect.n || std::abs(L - expect.L) > 1e-12 * expect.L)
        throw IoError(path + ":" + std::to_string(lineno) + ": grid does not match the run configuration");
    VecField u{Field(expect), Field(expect)};
    for (std::size_t k = 0; k < expect.size(); ++k) {
        if (!next(ss)) throw IoError(path + ": unexpected end of file after line " + std::to_string(lineno));
        double a, b;
        if (!(ss >> a >> b) || !std::isfinite(a) || !std::isfinite(b))
            throw IoError(path + ":" + std::to_string(lineno) + ": expected two finite numbers");
        u[0].v[k] = a;
        u[1].v[k] = b;
    }
    return u;
}

inline VecField taylor_green(const PeriodicGrid& g) {
    const double periods = g.L / (2.0 * std::numbers::pi);
    require(std::abs(periods - std::round(periods)) < 1e-12 && periods >= 1.0,
            "Taylor-Green data needs L to be a multiple of 2 pi");
    return {spectral::sample(g, [](double x, double y) { return std::cos(x) * std::sin(y); }),
            spectral::sample(g, [](double x, double y) { return -std::sin(x) * std::cos(y); })};
}

/// Largest |mode index| drawn for random stream functions; independent of n so that
/// refinement studies see the same continuous field.
inline constexpr int kRandomModes = 8;

/// Power-law random stream function times a Gaussian envelope; curl, project, truncate,
/// normalize to max |u| = amplitude.
inline VecField random_divfree(const PeriodicGrid& g, std::uint64_t seed, const InitParams& p) {
    require(g.n / 3 >= kRandomModes, "grid too coarse for the random mode set");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Spectrum ns(g);
    for (int mx = -kRandomModes; mx <= kRandomModes; ++mx)
        for (int my = 0; my <= kRandomModes; ++my) {
            const double re = nd(rng), im = nd(rng);
            if (my == 0 && mx <= 0) continue;  // conjugate partner or mean
            const double k = 2.0 * std::numbers::pi / g.L * std::hypot(mx, my);
            ns((mx + g.n) % g.n, my) = std::pow(k, -p.slope) * cplx_t(re, im);
        }
    Field psi = spectral::inverse(ns);
    const double w = p.envelope > 0.0 ? p.envelope : g.L / 14.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const double dx = g.x(i) - p.centre_x, dy = g.x(j) - p.centre_y;
            psi(i, j) *= std::exp(-(dx * dx + dy * dy) / (2 * w * w));
        }
    VecSpectrum u = spectral::truncate(spectral::leray_project(spectral::perp_gradient(spectral::forward(psi))));
    VecField uf = spectral::inverse(u);
    const double m = std::max(spectral::max_abs(uf[0]), spectral::max_abs(uf[1]));
    require(m > 0.0, "random field vanished");
    for (auto& c : uf)
        for (auto& v : c.v) v *= p.amplitude / m;
    return uf;
}

/// Smooth radial cutoff equal to 1 inside 0.8 R and 0 beyond R.
inline double cutoff_mask(double r, double R) {
    if (r <= 0.8 * R) return 1.0;
    if (r >= R) return 0.0;
    const double s = (r - 0.8 * R) / (0.2 * R);
    const auto bump = [](double x) { return x <= 0.0 ? 0.0 : std::exp(-1.0 / x); };
    return bump(1.0 - s) / (bump(1.0 - s) + bump(s));
}

inline VecField init_data(const InitParams& p, const PeriodicGrid& g, std::uint64_t seed) {
    g.validate();
    VecField u;
    switch (p.kind) {
        case InitKind::taylor_green: u = taylor_green(g); break;
        case InitKind::random_divfree: u = random_divfree(g, seed, p); break;
        case InitKind::file: u = load_velocity_text(p.path, g); break;
    }
    if (p.cutoff_radius > 0.0)
        for (auto& c : u)
            for (int i = 0; i < g.n; ++i)
                for (int j = 0; j < g.n; ++j) c(i, j) *= cutoff_mask(std::hypot(g.x(i), g.x(j)), p.cutoff_radius);
    return spectral::inverse(spectral::truncate(spectral::leray_project(spectral::forward(u))));
}

// ---------------------------------------------------------------------------
// Time stepping

struct StepOptions {
    bool advect = true;  // false freezes b = 0 (pure heat flow)
};

class Stepper {
public:
    Stepper(const PeriodicGrid& g, double dt, double epsilon, Shape shape, StepOptions opt = {})
        : grid_(g), dt_(dt), eps_(epsilon), opt_(opt), e_half_(g.csize()), e_full_(g.csize()) {
        require(dt > 0.0 && std::isfinite(dt), "time step must be positive");
        require(epsilon >= 0.0, "mollification width must be non-negative");
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.nc(); ++j) {
                const double k2 = g.k(i) * g.k(i) + g.k(j) * g.k(j);
                e_half_[i * g.nc() + j] = std::exp(-0.5 * k2 * dt);
                e_full_[i * g.nc() + j] = std::exp(-k2 * dt);
            }
        if (epsilon > 0.0) symbol_ = spectral::mollifier_symbol(g, {epsilon, shape});
    }

    double dt() const { return dt_; }

    /// -P[(b.grad) u], truncated
    VecSpectrum nonlinear(const VecSpectrum& u) const {
        const auto& g = grid_;
        if (!opt_.advect) return {Spectrum(g), Spectrum(g)};
        std::array<Field, 2> b;
        for (int a = 0; a < 2; ++a) b[a] = spectral::inverse(symbol_ ? spectral::mollify(u[a], *symbol_) : u[a]);
        VecSpectrum out;
        for (int c = 0; c < 2; ++c) {
            Field acc(g);
            for (int a = 0; a < 2; ++a) {
                const Field d = spectral::inverse(spectral::derivative(u[c], a));
                for (std::size_t k = 0; k < acc.v.size(); ++k) acc.v[k] += b[a].v[k] * d.v[k];
            }
            out[c] = spectral::truncate(spectral::forward(acc));
        }
        out = spectral::leray_project(out);
        for (auto& c : out) c *= -1.0;
        return out;
    }

    /// Advances one step; adds the RK4 quadrature of ||grad u||^2 over the step to *dissipation.
    State step(const State& s, double* dissipation = nullptr) const {
        require(s.grid == grid_, "state grid does not match the stepper");
        const double h = dt_;
        const VecSpectrum& u0 = s.u;
        const VecSpectrum k1 = nonlinear(u0);
        const VecSpectrum s2 = half(combine(u0, 0.5 * h, k1));
        const VecSpectrum k2 = nonlinear(s2);
        const VecSpectrum s3 = combine(half(u0), 0.5 * h, k2);
        const VecSpectrum k3 = nonlinear(s3);
        const VecSpectrum s4 = combine(full(u0), h, half(k3));
        const VecSpectrum k4 = nonlinear(s4);

        State out = s;
        for (int c = 0; c < 2; ++c) {
            Spectrum& r = out.u[c];
            for (std::size_t k = 0; k < r.c.size(); ++k) {
                r.c[k] = e_full_[k] * u0[c].c[k] +
                         (h / 6.0) * (e_full_[k] * k1[c].c[k] + 2.0 * e_half_[k] * (k2[c].c[k] + k3[c].c[k]) +
                                      k4[c].c[k]);
                if (!std::isfinite(r.c[k].real()) || !std::isfinite(r.c[k].imag()))
                    throw BlowUpError("non-finite velocity coefficient", s.t);
            }
        }
        out.t = s.t + h;
        if (dissipation)
            *dissipation +=
                (h / 6.0) * (grad_norm_sq(u0) + 2.0 * grad_norm_sq(s2) + 2.0 * grad_norm_sq(s3) + grad_norm_sq(s4));
        return out;
    }

private:
    VecSpectrum scaled(const VecSpectrum& u, const std::vector<double>& f) const {
        VecSpectrum out = u;
        for (auto& c : out)
            for (std::size_t k = 0; k < c.c.size(); ++k) c.c[k] *= f[k];
        return out;
    }
    VecSpectrum half(const VecSpectrum& u) const { return scaled(u, e_half_); }
    VecSpectrum full(const VecSpectrum& u) const { return scaled(u, e_full_); }
    static VecSpectrum combine(const VecSpectrum& a, double s, const VecSpectrum& b) {
        VecSpectrum out = a;
        for (int c = 0; c < 2; ++c)
            for (std::size_t k = 0; k < out[c].c.size(); ++k) out[c].c[k] += s * b[c].c[k];
        return out;
    }

    PeriodicGrid grid_;
    double dt_, eps_;
    StepOptions opt_;
    std::vector<double> e_half_, e_full_;
    std::optional<Spectrum> symbol_;
};

inline State step(const State& s, double dt, StepOptions opt = {}) {
    return Stepper(s.grid, dt, s.epsilon, s.shape, opt).step(s);
}

/// dt bound: a quarter of the advective CFL limit h / max|u|
inline double stable_dt(const State& s) {
    const auto u = s.velocity();
    const double m = std::max(spectral::max_abs(u[0]), spectral::max_abs(u[1]));
    return m == 0.0 ? std::numeric_limits<double>::infinity() : 0.25 * s.grid.h() / m;
}

// ---------------------------------------------------------------------------
// Ledger

struct LedgerRow {
    double t = 0.0;
    double e_phi_u = 0.0;           // ||sqrt(Phi) u||^2
    double e_phi_grad_u = 0.0;      // ||sqrt(Phi) grad u||^2
    double e_phi_omega = 0.0;       // ||sqrt(Phi) omega||^2
    double e_phi_grad_omega = 0.0;  // ||sqrt(Phi) grad omega||^2
    double diss_cum = 0.0;          // int_0^t ||grad u||^2 ds
    double e_u_l2 = 0.0;            // ||u||^2
    double u_l4_phi = 0.0;          // ||sqrt(Phi) u||_4
};

inline constexpr const char* kLedgerHeader = "t,e_phi_u,e_phi_grad_u,e_phi_omega,e_phi_grad_omega,diss_cum,e_u_l2,u_l4_phi";

struct Ledger {
    std::vector<LedgerRow> rows;
    bool blew_up = false;
    double last_valid_time = 0.0;
};

inline LedgerRow measure(const State& s, const Field& phi, double diss_cum) {
    const auto& g = s.grid;
    LedgerRow r;
    r.t = s.t;
    r.diss_cum = diss_cum;
    const VecField u = s.velocity();
    r.e_phi_u = spectral::weighted_norm_sq(u, phi);
    r.e_u_l2 = spectral::l2_norm_sq(u);
    for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a)
            r.e_phi_grad_u += spectral::weighted_norm_sq(spectral::inverse(spectral::derivative(s.u[c], a)), phi);
    const Spectrum w = spectral::curl(s.u);
    r.e_phi_omega = spectral::weighted_norm_sq(spectral::inverse(w), phi);
    for (int a = 0; a < 2; ++a)
        r.e_phi_grad_omega += spectral::weighted_norm_sq(spectral::inverse(spectral::derivative(w, a)), phi);
    double q = 0.0;
    for (std::size_t k = 0; k < u[0].v.size(); ++k) {
        const double m2 = u[0].v[k] * u[0].v[k] + u[1].v[k] * u[1].v[k];
        q += phi.v[k] * phi.v[k] * m2 * m2;
    }
    r.u_l4_phi = std::pow(q * g.h() * g.h(), 0.25);
    return r;
}

struct RunConfig {
    int n = 64;
    double L = 2.0 * std::numbers::pi;
    double dt = 1e-3;
    double t_end = 1.0;
    double epsilon = 0.0;
    Shape shape = Shape::compact_bump;
    weights::WeightSpec weight = weights::WeightSpec::constant(2);
    InitParams init;
    int cadence = 10;          // ledger row every this many steps
    int dense_rows = 4;        // additionally record each of the first steps
    int checkpoint_every = 0;  // steps between observer calls; 0 disables
    std::uint64_t seed = 1;

    PeriodicGrid grid() const { return {n, L}; }
    void validate() const {
        grid().validate();
        require(dt > 0.0 && t_end >= 0.0, "dt must be positive and T_end non-negative");
        require(epsilon >= 0.0 && (epsilon == 0.0 || epsilon < 0.25 * L), "epsilon must lie in [0, L/4)");
        require(cadence >= 1 && dense_rows >= 0 && checkpoint_every >= 0, "cadences must be non-negative");
        require(weight.dim == 2, "2D runs need a two-dimensional weight");
        weight.validate();
    }
    long steps() const { return std::lround(t_end / dt); }
};

using Observer = std::function<void(const State&, long step)>;

inline State initial_state(const RunConfig& cfg) {
    cfg.validate();
    State s = make_state(init_data(cfg.init, cfg.grid(), cfg.seed), cfg.epsilon, cfg.shape);
    return s;
}

/// Steps to T_end, appending rows to `ledger` as it goes so a failure leaves a valid prefix.
inline State run(const RunConfig& cfg, Ledger& ledger, const Observer& observe = {}) {
    State s = initial_state(cfg);
    require(cfg.dt <= stable_dt(s), "dt exceeds a quarter of the advective CFL limit");
    const Field phi = spectral::weight_field(s.grid, cfg.weight);
    const Stepper stepper(s.grid, cfg.dt, cfg.epsilon, cfg.shape);
    double diss = 0.0;
    ledger.rows.push_back(measure(s, phi, diss));
    const long nsteps = cfg.steps();
    try {
        for (long k = 1; k <= nsteps; ++k) {
            s = stepper.step(s, &diss);
            s.t = k * cfg.dt;
            if (k <= cfg.dense_rows || k % cfg.cadence == 0 || k == nsteps) ledger.rows.push_back(measure(s, phi, diss));
            if (observe && cfg.checkpoint_every > 0 && k % cfg.checkpoint_every == 0) observe(s, k);
        }
    } catch (const BlowUpError& e) {
        ledger.blew_up = true;
        ledger.last_valid_time = e.last_valid_time;
        throw;
    }
    ledger.last_valid_time = s.t;
    return s;
}

// ---------------------------------------------------------------------------
// Ledger checks

/// Cumulative trapezoid of f(row) over the ledger rows.
template <class F>
std::vector<double> cumulative_trapezoid(const std::vector<LedgerRow>& rows, F&& f) {
    std::vector<double> out(rows.size(), 0.0);
    for (std::size_t i = 1; i < rows.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (rows[i].t - rows[i - 1].t) * (f(rows[i]) + f(rows[i - 1]));
    return out;
}

struct PcReport {
    bool holds = false;      // for the c_phi that was passed in
    double c_min = 0.0;      // smallest constant that makes every row hold (bisection)
    int worst_row = -1;      // row that binds c_min
    std::vector<double> lhs, rhs;
};

/// LHS(t) = ||sqrt(Phi)u(t)||^2 + int ||sqrt(Phi) grad u||^2,
/// RHS(t) = ||sqrt(Phi)u0||^2 + c int (||sqrt(Phi)u||^2 + ||sqrt(Phi)u||^{2d}).
inline PcReport verify_pc(const Ledger& ledger, double c_phi, int d) {
    require(!ledger.rows.empty(), "empty ledger");
    require(d == 2 || d == 3, "dimension must be 2 or 3");
    const auto& rows = ledger.rows;
    const double a0 = rows.front().e_phi_u;
    const auto grad = cumulative_trapezoid(rows, [](const LedgerRow& r) { return r.e_phi_grad_u; });
    const auto src =
        cumulative_trapezoid(rows, [d](const LedgerRow& r) { return r.e_phi_u + std::pow(r.e_phi_u, d); });
    PcReport rep;
    std::vector<double> lhs(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) lhs[i] = rows[i].e_phi_u + grad[i];
    const auto holds_for = [&](double c) {
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (lhs[i] > a0 + c * src[i] + 1e-13 * std::max(1.0, a0)) return false;
        return true;
    };
    rep.lhs = lhs;
    rep.rhs.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rep.rhs[i] = a0 + c_phi * src[i];
    rep.holds = holds_for(c_phi);

    double hi = 1.0;
    if (holds_for(0.0)) {
        rep.c_min = 0.0;
    } else {
        int guard = 0;
        while (!holds_for(hi)) {
            hi *= 2.0;
            if (++guard > 200) {
                hi = std::numeric_limits<double>::infinity();
                break;
            }
        }
        double lo = 0.0;
        if (std::isfinite(hi)) {
            while (hi - lo > 1e-3 * hi) {
                const double mid = 0.5 * (lo + hi);
                (holds_for(mid) ? hi : lo) = mid;
            }
        }
        rep.c_min = hi;
    }
    double best = -1.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (src[i] <= 0.0) continue;
        const double need = (lhs[i] - a0) / src[i];
        if (need > best) {
            best = need;
            rep.worst_row = static_cast<int>(i);
        }
    }
    return rep;
}

struct VorticityReport {
    double c_min = 0.0;      // minimal C in the exponential envelope
    bool holds = false;      // envelope holds with c_min (always, unless infinite)
    int worst_row = -1;
};

/// ||sqrt(Phi) w(t)||^2 + int ||sqrt(Phi) grad w||^2 <= ||sqrt(Phi) w0||^2 exp(C int (1 + ||sqrt(Phi)u||_4^{4/3})).
inline VorticityReport verify_vorticity_2d(const Ledger& ledger) {
    require(!ledger.rows.empty(), "empty ledger");
    const auto& rows = ledger.rows;
    const double w0 = rows.front().e_phi_omega;
    const auto diss = cumulative_trapezoid(rows, [](const LedgerRow& r) { return r.e_phi_grad_omega; });
    const auto j = cumulative_trapezoid(rows, [](const LedgerRow& r) { return 1.0 + std::pow(r.u_l4_phi, 4.0 / 3.0); });
    VorticityReport rep;
    rep.holds = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double lhs = rows[i].e_phi_omega + diss[i];
        if (lhs <= w0 * (1.0 + 1e-13)) continue;
        if (w0 == 0.0 || j[i] <= 0.0) {
            rep.c_min = std::numeric_limits<double>::infinity();
            rep.holds = false;
            rep.worst_row = static_cast<int>(i);
            break;
        }
        const double need = std::log(lhs / w0) / j[i];
        if (need > rep.c_min) {
            rep.c_min = need;
            rep.worst_row = static_cast<int>(i);
        }
    }
    return rep;
}

struct ContinuityReport {
    bool pass = false;
    double initial = 0.0;
    double extrapolated = 0.0;
    double rel_error = 0.0;
};

/// Quadratic through the first three rows after t = 0, evaluated at t = 0.
inline ContinuityReport continuity_at_zero(const Ledger& ledger, double tol = 1e-4) {
    require(ledger.rows.size() >= 4, "continuity check needs three rows after t = 0");
    const auto& r = ledger.rows;
    const double t1 = r[1].t, t2 = r[2].t, t3 = r[3].t;
    const double f1 = r[1].e_phi_u, f2 = r[2].e_phi_u, f3 = r[3].e_phi_u;
    const double l1 = (t2 * t3) / ((t1 - t2) * (t1 - t3));
    const double l2 = (t1 * t3) / ((t2 - t1) * (t2 - t3));
    const double l3 = (t1 * t2) / ((t3 - t1) * (t3 - t2));
    ContinuityReport rep;
    rep.initial = r[0].e_phi_u;
    rep.extrapolated = l1 * f1 + l2 * f2 + l3 * f3;
    const double diff = std::abs(rep.extrapolated - rep.initial);
    rep.rel_error = rep.initial == 0.0 ? diff : diff / rep.initial;
    rep.pass = rep.rel_error <= tol;
    return rep;
}

// ---------------------------------------------------------------------------
// Scaling u -> lambda u(lambda x)

enum class Extension { zero, periodic };

/// Trigonometric interpolant of `f` at the points lambda * x_i (tensor grid), O(n^3).
inline Field evaluate_dilated(const Spectrum& f, double lambda, Extension ext) {
    const auto& g = f.grid;
    const int n = g.n, nc = g.nc();
    std::vector<double> pos(n);
    std::vector<char> inside(n);
    for (int i = 0; i < n; ++i) {
        pos[i] = lambda * g.x(i) - g.x(0);  // offset from the grid origin
        inside[i] = ext == Extension::periodic || std::abs(lambda * g.x(i)) < 0.5 * g.L;
    }
    // stage 1: sum over the half axis (j) for every full-axis row i
    std::vector<cplx_t> a(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int q = 0; q < n; ++q) {
            cplx_t acc = 0.0;
            for (int j = 0; j < nc; ++j) {
                if (f(i, j) == cplx_t(0.0)) continue;
                const double w = (j == 0 || j == n / 2) ? 1.0 : 2.0;
                acc += w * f(i, j) * std::polar(1.0, g.k(j) * pos[q]);
            }
            a[static_cast<std::size_t>(i) * n + q] = acc;
        }
    Field out(g);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            if (!inside[p] || !inside[q]) continue;
            cplx_t acc = 0.0;
            for (int i = 0; i < n; ++i) acc += a[static_cast<std::size_t>(i) * n + q] * std::polar(1.0, g.k(i) * pos[p]);
            out(p, q) = acc.real();
        }
    return out;
}

/// u_lambda(x) = lambda u(lambda x); time tag t/lambda^2, mollifier width eps/lambda.
inline State scale_state(const State& s, double lambda, Extension ext = Extension::zero) {
    require(lambda >= 1.0, "scaling factor must be at least 1");
    require(lambda * s.grid.h() <= s.grid.L / 8.0, "rescaled field is not resolvable on this grid");
    if (lambda == 1.0) return s;
    VecField u;
    for (int c = 0; c < 2; ++c) {
        u[c] = evaluate_dilated(s.u[c], lambda, ext);
        for (auto& v : u[c].v) v *= lambda;
    }
    State out = make_state(u, s.epsilon / lambda, s.shape);
    out.t = s.t / (lambda * lambda);
    return out;
}

}  // namespace wlns::solver2d
