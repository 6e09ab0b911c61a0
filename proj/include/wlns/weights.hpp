#pragma once

// Power-type weight functions and numerical checks of the adapted-weight
// axioms, Muckenhoupt A_q constants and weight-pair conditions.
//
// All derivatives are closed forms. Suprema over unbounded sets are
// estimated on dyadic ladders (shells, cube sizes, dilation factors) and a
// ladder is declared unbounded by the growth rule in `grows_without_bound`.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wlns/errors.hpp"

namespace wlns::weights {

enum class Family { constant, radial_power, cylindrical_power, product_pair_member };

/// (1+rho)^{-gamma} versus (1+rho^2)^{-gamma/2}.
enum class Form { one_plus_abs, one_plus_sq_half };

struct WeightSpec {
    Family family = Family::constant;
    double gamma = 0.0;
    int dim = 3;
    Form form = Form::one_plus_abs;

    static WeightSpec constant(int dim) { return {Family::constant, 0.0, dim, Form::one_plus_abs}; }
    static WeightSpec radial(double gamma, int dim, Form form = Form::one_plus_abs) {
        return {Family::radial_power, gamma, dim, form};
    }
    static WeightSpec cylindrical(double gamma, Form form = Form::one_plus_abs) {
        return {Family::cylindrical_power, gamma, 3, form};
    }

    /// Weight depends on r = sqrt(x1^2 + x2^2) only.
    bool axis_symmetric() const {
        return family == Family::cylindrical_power || family == Family::product_pair_member ||
               family == Family::constant;
    }

    /// Dimension of the space in which the weight is radial.
    int effective_dim() const {
        if (family == Family::cylindrical_power || family == Family::product_pair_member) return 2;
        return dim;
    }

    /// Phi^theta; the power families are closed under powers.
    WeightSpec pow(double theta) const {
        WeightSpec w = *this;
        w.gamma = gamma * theta;
        return w;
    }

    void validate() const {
        require(dim == 2 || dim == 3, "weight dimension must be 2 or 3");
        require(gamma >= 0.0 && std::isfinite(gamma), "weight exponent must be finite and >= 0");
        if (family == Family::cylindrical_power || family == Family::product_pair_member)
            require(dim == 3, "cylindrical weights live in dimension 3");
    }
};

inline std::string to_string(Family f) {
    switch (f) {
        case Family::constant: return "constant";
        case Family::radial_power: return "radial";
        case Family::cylindrical_power: return "cylindrical";
        case Family::product_pair_member: return "product_pair_member";
    }
    return "?";
}

inline std::string to_string(Form f) { return f == Form::one_plus_abs ? "one_plus_abs" : "one_plus_sq_half"; }

// ---------------------------------------------------------------------------
// Radial profile f(rho) and its derivatives.

/// log Phi as a function of the weight-relevant radius.
inline double log_profile(const WeightSpec& w, double rho) {
    if (w.family == Family::constant || w.gamma == 0.0) return 0.0;
    if (w.form == Form::one_plus_abs) return -w.gamma * std::log1p(rho);
    return -0.5 * w.gamma * std::log1p(rho * rho);
}

inline double profile(const WeightSpec& w, double rho) { return std::exp(log_profile(w, rho)); }

inline double profile_d1(const WeightSpec& w, double rho) {
    if (w.family == Family::constant || w.gamma == 0.0) return 0.0;
    const double g = w.gamma;
    if (w.form == Form::one_plus_abs) return -g * std::pow(1.0 + rho, -g - 1.0);
    return -g * rho * std::pow(1.0 + rho * rho, -0.5 * g - 1.0);
}

inline double profile_d2(const WeightSpec& w, double rho) {
    if (w.family == Family::constant || w.gamma == 0.0) return 0.0;
    const double g = w.gamma;
    if (w.form == Form::one_plus_abs) return g * (g + 1.0) * std::pow(1.0 + rho, -g - 2.0);
    const double s = 1.0 + rho * rho;
    return -g * std::pow(s, -0.5 * g - 1.0) + g * (g + 2.0) * rho * rho * std::pow(s, -0.5 * g - 2.0);
}

/// Laplacian of the radial profile in the weight's effective dimension.
/// The one_plus_abs form has a cusp at rho = 0 where this is -infinity.
inline double profile_laplacian(const WeightSpec& w, double rho) {
    if (w.family == Family::constant || w.gamma == 0.0) return 0.0;
    const int m = w.effective_dim();
    if (rho == 0.0) {
        if (w.form == Form::one_plus_abs) return -std::numeric_limits<double>::infinity();
        return -w.gamma * m;  // f''(0) + (m-1) lim f'/rho
    }
    return profile_d2(w, rho) + (m - 1) / rho * profile_d1(w, rho);
}

/// Smooth member of the same equivalence class: (1+rho)^{-g} ~ (1+rho^2)^{-g/2}.
inline WeightSpec smooth_equivalent(const WeightSpec& w) {
    WeightSpec s = w;
    s.form = Form::one_plus_sq_half;
    return s;
}

inline double weight_radius(const WeightSpec& w, std::span<const double> x) {
    switch (w.family) {
        case Family::constant: return 0.0;
        case Family::radial_power: {
            double s = 0.0;
            for (double c : x) s += c * c;
            return std::sqrt(s);
        }
        case Family::cylindrical_power:
        case Family::product_pair_member: return std::hypot(x[0], x[1]);
    }
    return 0.0;
}

/// Phi(x) in closed form.
inline double eval_weight(const WeightSpec& w, std::span<const double> x) {
    if (static_cast<int>(x.size()) != w.dim)
        throw ContractError("point dimension " + std::to_string(x.size()) + " does not match weight dimension " +
                            std::to_string(w.dim));
    return profile(w, weight_radius(w, x));
}

inline double gradient_norm(const WeightSpec& w, std::span<const double> x) {
    return std::abs(profile_d1(w, weight_radius(w, x)));
}

// ---------------------------------------------------------------------------
// Ladder trend rule.

inline constexpr double kDivergenceGrowth = 1.05;

/// True when the last four entries increase strictly and the last one exceeds
/// the one three rungs earlier by more than kDivergenceGrowth.
inline bool grows_without_bound(std::span<const double> ladder) {
    const std::size_t n = ladder.size();
    if (n < 4) return false;
    for (std::size_t i = n - 3; i < n; ++i)
        if (!(ladder[i] > ladder[i - 1])) return false;
    return ladder[n - 1] > kDivergenceGrowth * ladder[n - 4];
}

// ---------------------------------------------------------------------------
// Sample clouds.

using Point = std::array<double, 3>;

struct SampleCloud {
    int dim = 3;
    std::vector<Point> points;
    std::span<const double> at(std::size_t i) const { return {points[i].data(), static_cast<std::size_t>(dim)}; }
    std::size_t size() const { return points.size(); }
};

/// Points along a few fixed directions with log-spaced radii in [0, rho_max].
inline SampleCloud radial_cloud(int dim, double rho_max = 1e6, int per_octave = 16) {
    SampleCloud c;
    c.dim = dim;
    const double inv2 = 1.0 / std::sqrt(2.0), inv3 = 1.0 / std::sqrt(3.0);
    std::vector<Point> dirs = {{1, 0, 0}, {0, 1, 0}, {inv2, inv2, 0}};
    if (dim == 3) {
        dirs.push_back({0, 0, 1});
        dirs.push_back({inv3, inv3, inv3});
        dirs.push_back({inv2, 0, inv2});
    }
    std::vector<double> radii{0.0};
    const int octaves = static_cast<int>(std::ceil(std::log2(1.0 + rho_max)));
    for (int k = 1; k <= octaves * per_octave; ++k) {
        const double rho = std::exp2(static_cast<double>(k) / per_octave) - 1.0;
        radii.push_back(std::min(rho, rho_max));
    }
    for (const auto& d : dirs)
        for (double rho : radii) c.points.push_back({rho * d[0], rho * d[1], rho * d[2]});
    return c;
}

namespace detail {

/// Per-dyadic-shell maxima of `values`, indexed by floor(log2(1+rho)).
inline std::vector<double> shell_maxima(const std::vector<double>& rho, const std::vector<double>& values) {
    std::map<int, double> shells;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const int s = static_cast<int>(std::floor(std::log2(1.0 + rho[i])));
        auto [it, inserted] = shells.try_emplace(s, values[i]);
        if (!inserted) it->second = std::max(it->second, values[i]);
    }
    std::vector<double> out;
    for (auto& [k, v] : shells) out.push_back(v);
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Axiom checks.

struct AxiomResult {
    std::string axiom;
    bool pass = false;
    double constant = 0.0;
    double evidence_scale = 0.0;  // largest radius / dilation / cube size examined
};

/// (H1): 0 < Phi <= 1 on the cloud. Positivity also holds symbolically for every family.
inline AxiomResult check_h1(const WeightSpec& w, const SampleCloud& cloud) {
    w.validate();
    AxiomResult r{"H1", true, 1.0, 0.0};
    double lo = 1.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double v = eval_weight(w, cloud.at(i));
        lo = std::min(lo, v);
        r.evidence_scale = std::max(r.evidence_scale, weight_radius(w, cloud.at(i)));
        if (!(v > 0.0 && v <= 1.0)) r.pass = false;
    }
    r.constant = lo;
    return r;
}

/// (H2): |grad Phi| <= C1 Phi^{3/2}. constant = sup of the ratio on the cloud.
inline AxiomResult check_h2(const WeightSpec& w, const SampleCloud& cloud) {
    w.validate();
    require(cloud.size() > 0, "sample cloud is empty");
    std::vector<double> rho, ratio;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double p = weight_radius(w, cloud.at(i));
        rho.push_back(p);
        ratio.push_back(std::abs(profile_d1(w, p)) / std::exp(1.5 * log_profile(w, p)));
    }
    AxiomResult r{"H2", false, *std::max_element(ratio.begin(), ratio.end()),
                  *std::max_element(rho.begin(), rho.end())};
    const auto shells = detail::shell_maxima(rho, ratio);
    r.pass = std::isfinite(r.constant) && !grows_without_bound(shells);
    return r;
}

inline std::vector<double> default_lambda_grid() {
    std::vector<double> g;
    for (int j = 0; j <= 16; ++j) g.push_back(std::pow(10.0, j / 4.0));
    return g;
}

/// (H4): Phi(x) <= Phi(x/lambda) <= C2 lambda^2 Phi(x) for lambda >= 1.
inline AxiomResult check_h4(const WeightSpec& w, std::span<const double> lambdas, const SampleCloud& cloud) {
    w.validate();
    require(!lambdas.empty(), "lambda grid is empty");
    std::vector<double> grid(lambdas.begin(), lambdas.end());
    std::sort(grid.begin(), grid.end());
    require(grid.front() >= 1.0, "dilation factors must be >= 1");
    bool lower_ok = true;
    std::vector<double> per_lambda;
    for (double lam : grid) {
        double best = 0.0;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const double p = weight_radius(w, cloud.at(i));
            const double lx = log_profile(w, p), lxl = log_profile(w, p / lam);
            if (lx > lxl + 1e-12) lower_ok = false;
            best = std::max(best, std::exp(lxl - lx) / (lam * lam));
        }
        per_lambda.push_back(best);
    }
    AxiomResult r{"H4", false, *std::max_element(per_lambda.begin(), per_lambda.end()), grid.back()};
    r.pass = lower_ok && std::isfinite(r.constant) && !grows_without_bound(per_lambda);
    return r;
}

// ---------------------------------------------------------------------------
// Muckenhoupt constants.

/// Cubes Q(o * h, h) for every offset o and half-side h. Offsets are in units of
/// the half-side so every scale sees the same configuration.
struct CubeFamily {
    std::vector<Point> centers;
    std::vector<double> half_sides;
    int samples_per_cube = 8;

    void validate() const {
        require(!centers.empty(), "cube family needs at least one center");
        require(!half_sides.empty(), "cube family needs at least one size");
        for (std::size_t i = 0; i < half_sides.size(); ++i) {
            require(half_sides[i] > 0.0, "cube half-sides must be positive");
            if (i > 0) require(half_sides[i] > half_sides[i - 1], "cube half-sides must be strictly increasing");
        }
        require(samples_per_cube >= 8, "need at least 8 samples per cube axis");
    }
};

/// Half-sides 2^0 .. 2^{scales-1}; centered, corner-touching and detached cubes.
inline CubeFamily dyadic_cubes(int scales, int samples_per_cube = 8) {
    require(scales >= 1, "need at least one scale");
    CubeFamily f;
    f.samples_per_cube = samples_per_cube;
    f.centers = {{0, 0, 0}, {1, 0, 0}, {1, 1, 1}, {3, 0, 0}};
    for (int k = 0; k < scales; ++k) f.half_sides.push_back(std::exp2(k));
    return f;
}

inline constexpr int kDefaultScales = 20;

enum class AqStatus { finite, divergent, overflow };

inline std::string to_string(AqStatus s) {
    switch (s) {
        case AqStatus::finite: return "finite";
        case AqStatus::divergent: return "divergent";
        case AqStatus::overflow: return "overflow";
    }
    return "?";
}

struct AqEstimate {
    AqStatus status = AqStatus::finite;
    double value = 0.0;              // supremum over the whole family (finite cubes)
    std::vector<double> per_scale;   // supremum over centers, per half-side
    bool is_finite() const { return status == AqStatus::finite; }
};

namespace detail {

struct CubeSums {
    double phi = 0.0;
    double dual = 0.0;  // integral of Phi^{-1/(q-1)}
};

inline constexpr double kRefine = 1.0;  // leaf side relative to (1 + distance to origin)
// Midpoint rule on a partition refined toward the origin of the effective
// coordinates, where the power weights have their cusp / fastest variation.
template <int D>
void integrate_box(const WeightSpec& w, double dual_exp, const std::array<double, D>& lo, double side,
                   int m, CubeSums& acc) {
    double dist2 = 0.0;
    for (int a = 0; a < D; ++a) {
        const double hi = lo[a] + side;
        const double c = lo[a] > 0.0 ? lo[a] : (hi < 0.0 ? -hi : 0.0);
        dist2 += c * c;
    }
    const double dist = std::sqrt(dist2);
    if (side > kRefine * (1.0 + dist)) {
        const double half = 0.5 * side;
        for (int child = 0; child < (1 << D); ++child) {
            std::array<double, D> clo = lo;
            for (int a = 0; a < D; ++a)
                if (child & (1 << a)) clo[a] += half;
            integrate_box<D>(w, dual_exp, clo, half, m, acc);
        }
        return;
    }
    const double h = side / m;
    const double cell = std::pow(h, D);
    double sp = 0.0, sd = 0.0;
    std::array<int, D> idx{};
    const int total = static_cast<int>(std::pow(m, D));
    for (int n = 0; n < total; ++n) {
        int rem = n;
        double r2 = 0.0;
        for (int a = 0; a < D; ++a) {
            idx[a] = rem % m;
            rem /= m;
            const double x = lo[a] + (idx[a] + 0.5) * h;
            r2 += x * x;
        }
        const double lp = log_profile(w, std::sqrt(r2));
        sp += std::exp(lp);
        sd += std::exp(dual_exp * lp);
    }
    acc.phi += sp * cell;
    acc.dual += sd * cell;
}

template <int D>
double cube_value(const WeightSpec& w, double q, const Point& offset, double half_side, int m) {
    std::array<double, D> lo;
    for (int a = 0; a < D; ++a) lo[a] = (offset[a] - 1.0) * half_side;
    CubeSums s;
    integrate_box<D>(w, -1.0 / (q - 1.0), lo, 2.0 * half_side, m, s);
    const double vol = std::pow(2.0 * half_side, D);
    if (!std::isfinite(s.phi) || !std::isfinite(s.dual)) return std::numeric_limits<double>::infinity();
    return std::exp(std::log(s.phi / vol) / q + (1.0 - 1.0 / q) * std::log(s.dual / vol));
}

}  // namespace detail

/// Supremum of the A_q averaged product over the cube family, with the
/// divergence sentinel when the per-scale suprema keep growing.
inline AqEstimate aq_estimate(const WeightSpec& w, double q, const CubeFamily& cubes) {
    w.validate();
    cubes.validate();
    require(q > 1.0, "A_q exponent must exceed 1");
    AqEstimate est;
    if (w.family == Family::constant || w.gamma == 0.0) {
        est.per_scale.assign(cubes.half_sides.size(), 1.0);
        est.value = 1.0;
        return est;
    }
    const int d = w.effective_dim();
    for (double hs : cubes.half_sides) {
        double best = 0.0;
        for (const auto& c : cubes.centers) {
            const double v = d == 2 ? detail::cube_value<2>(w, q, c, hs, cubes.samples_per_cube)
                                    : detail::cube_value<3>(w, q, c, hs, cubes.samples_per_cube);
            if (!std::isfinite(v)) {
                est.status = AqStatus::overflow;
                est.value = std::numeric_limits<double>::infinity();
                return est;
            }
            best = std::max(best, v);
        }
        est.per_scale.push_back(best);
    }
    est.value = *std::max_element(est.per_scale.begin(), est.per_scale.end());
    if (grows_without_bound(est.per_scale)) est.status = AqStatus::divergent;
    return est;
}

/// The closed-form membership criterion for w_gamma = (1+|x|)^{-gamma} in A_q(R^d).
inline bool power_weight_in_aq(double gamma, int d, double q) { return -d * (q - 1.0) < gamma && gamma < d; }

// ---------------------------------------------------------------------------

struct AdaptedReport {
    AxiomResult h1, h2, h3, h4;
    double h3_exponent = 0.0;  // first r in the scan with Phi^r in A_r (0 when none)
    bool adapted = false;
    std::vector<AxiomResult> all() const { return {h1, h2, h3, h4}; }
};

inline std::vector<double> default_r_scan() { return {1.1, 1.2, 1.3, 1.5, 1.75, 2.0}; }

inline AdaptedReport check_adapted(const WeightSpec& w, std::span<const double> r_scan,
                                   const CubeFamily& cubes = dyadic_cubes(kDefaultScales)) {
    require(!r_scan.empty(), "r scan is empty");
    for (double r : r_scan) require(r > 1.0 && r <= 2.0, "H3 exponents must lie in (1, 2]");
    const auto cloud = radial_cloud(w.dim);
    AdaptedReport rep;
    rep.h1 = check_h1(w, cloud);
    rep.h2 = check_h2(w, cloud);
    rep.h4 = check_h4(w, default_lambda_grid(), cloud);
    rep.h3 = {"H3", false, std::numeric_limits<double>::infinity(), cubes.half_sides.back()};
    for (double r : r_scan) {
        const auto est = aq_estimate(w.pow(r), r, cubes);
        if (est.is_finite()) {
            rep.h3.pass = true;
            rep.h3.constant = est.value;
            rep.h3_exponent = r;
            break;
        }
    }
    rep.adapted = rep.h1.pass && rep.h2.pass && rep.h3.pass && rep.h4.pass;
    return rep;
}

// ---------------------------------------------------------------------------
// Weight pairs (Phi, Psi) for the axisymmetric vorticity estimate.

struct PairReport {
    bool ordering = false;          // Phi <= Psi <= 1
    bool psi_in_a2 = false;
    double a2_constant = 0.0;
    bool gradient_bound = false;    // |grad Psi| <= C sqrt(Phi) Psi
    double gradient_constant = 0.0;
    bool laplacian_bound = false;   // |Lap Psi| <= C Phi Psi
    double laplacian_constant = 0.0;
    double evidence_scale = 0.0;
    bool pass = false;
};

inline PairReport check_pair(const WeightSpec& phi, const WeightSpec& psi, const SampleCloud& cloud,
                             const CubeFamily& cubes = dyadic_cubes(kDefaultScales)) {
    phi.validate();
    psi.validate();
    require(phi.dim == 3 && psi.dim == 3, "weight pairs live in dimension 3");
    require(phi.axis_symmetric() && psi.axis_symmetric(), "weight pair requires weights depending on r only");
    require(cloud.dim == 3, "pair check needs a 3D sample cloud");

    PairReport rep;
    rep.ordering = true;
    std::vector<double> rs, grad_ratio, lap_ratio;
    const WeightSpec psi_s = smooth_equivalent(psi);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double r = std::hypot(cloud.points[i][0], cloud.points[i][1]);
        const double f = profile(phi, r), g = profile(psi, r);
        if (f > g * (1.0 + 1e-14) || g > 1.0) rep.ordering = false;
        rs.push_back(r);
        grad_ratio.push_back(std::abs(profile_d1(psi, r)) / (std::sqrt(f) * g));
        lap_ratio.push_back(std::abs(profile_laplacian(psi_s, r)) / (f * profile(psi_s, r)));
        rep.evidence_scale = std::max(rep.evidence_scale, r);
    }
    rep.gradient_constant = *std::max_element(grad_ratio.begin(), grad_ratio.end());
    rep.laplacian_constant = *std::max_element(lap_ratio.begin(), lap_ratio.end());
    rep.gradient_bound =
        std::isfinite(rep.gradient_constant) && !grows_without_bound(detail::shell_maxima(rs, grad_ratio));
    rep.laplacian_bound =
        std::isfinite(rep.laplacian_constant) && !grows_without_bound(detail::shell_maxima(rs, lap_ratio));
    const auto a2 = aq_estimate(psi, 2.0, cubes);
    rep.psi_in_a2 = a2.is_finite();
    rep.a2_constant = a2.value;
    rep.pass = rep.ordering && rep.psi_in_a2 && rep.gradient_bound && rep.laplacian_bound;
    return rep;
}

// ---------------------------------------------------------------------------

struct Lemma4Result {
    double c3 = 0.0;
    bool verified = false;
};

/// C3 from integrating g' >= -C1 g^{3/2} along rays: Phi^{-1/2} <= Phi(0)^{-1/2} + C1|x|/2.
inline Lemma4Result lemma4_bound(const WeightSpec& w, double c1) {
    w.validate();
    require(c1 >= 0.0, "C1 must be non-negative");
    const double phi0 = profile(w, 0.0);
    Lemma4Result res;
    res.c3 = std::pow(1.0 / std::sqrt(phi0) + 0.5 * c1, 2);
    res.verified = true;
    for (int k = 0; k <= 20 * 64; ++k) {
        const double rho = std::exp2(k / 64.0) - 1.0;
        if ((1.0 / ((1.0 + rho) * (1.0 + rho))) > res.c3 * profile(w, rho) * (1.0 + 1e-12)) res.verified = false;
    }
    return res;
}

struct Lemma2Result {
    double p = 0.0;
    bool finite = false;
};

/// Phi in A_s implies Phi^theta in A_p with p = 1 + theta (s - 1).
inline Lemma2Result lemma2_power(const WeightSpec& w, double s, double theta, const CubeFamily& cubes) {
    require(s > 1.0, "s must exceed 1");
    require(theta > 0.0 && theta <= 1.0, "theta must lie in (0, 1]");
    require(aq_estimate(w, s, cubes).is_finite(), "input weight is not in A_s on this cube family");
    Lemma2Result r;
    r.p = 1.0 + theta * (s - 1.0);
    r.finite = aq_estimate(w.pow(theta), r.p, cubes).is_finite();
    return r;
}

struct WeightConstants {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    std::map<double, AqEstimate> aq_table;
};

inline WeightConstants compute_constants(const WeightSpec& w, std::span<const double> qs, const CubeFamily& cubes) {
    const auto cloud = radial_cloud(w.dim);
    WeightConstants k;
    k.c1 = check_h2(w, cloud).constant;
    k.c2 = check_h4(w, default_lambda_grid(), cloud).constant;
    k.c3 = lemma4_bound(w, k.c1).c3;
    for (double q : qs) k.aq_table.emplace(q, aq_estimate(w, q, cubes));
    return k;
}

}  // namespace wlns::weights
