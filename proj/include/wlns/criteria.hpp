#pragma once
// Verification checks shared by the presets and the acceptance binary. Each check runs its own
// experiment, returns a verdict with a one-line detail and writes its ledgers when given a directory.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wlns/axisym.hpp"
#include "wlns/config.hpp"
#include "wlns/gronwall.hpp"
#include "wlns/io.hpp"
#include "wlns/solver2d.hpp"
#include "wlns/spectral.hpp"
#include "wlns/weights.hpp"

namespace wlns::harness {

using json = nlohmann::json;

struct Context {
    std::filesystem::path dir;             // empty: no artifacts
    std::optional<std::uint64_t> seed;     // overrides the check's own seed
    std::uint64_t seed_or(std::uint64_t s) const { return seed.value_or(s); }
};

struct CheckResult {
    std::string id;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
    double budget = 0.0;  // seconds; 0 means none
    json data = json::object();
    std::vector<std::string> files;
    bool within_budget() const { return budget <= 0.0 || seconds <= budget; }
};

struct Recorder {
    const Context& ctx;
    CheckResult& res;
    void file(const std::string& name, const std::string& text) {
        if (ctx.dir.empty()) return;
        io::write_text(ctx.dir / name, text);
        res.files.push_back(name);
    }
};

inline std::string fmt(double v, int prec = 4) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

// ---------------------------------------------------------------------------
// Configurations pinned by the checks

/// Off-centre energetic random data in which the weighted energy inequality binds.
inline solver2d::RunConfig binding_config(int n, double eps, double dt, std::uint64_t seed = 3) {
    solver2d::RunConfig c;
    c.n = n;
    c.L = 20.0;
    c.dt = dt;
    c.t_end = 0.1;
    c.epsilon = eps;
    c.weight = weights::WeightSpec::radial(1.0, 2);
    c.init.kind = solver2d::InitKind::random_divfree;
    c.init.amplitude = 50.0;
    c.init.centre_x = 4.0;
    c.init.slope = 3.0;
    c.init.envelope = 2.0;
    c.seed = seed;
    c.cadence = 5;
    return c;
}

/// Two opposite rings approaching head-on.
inline axisym::AxiRunConfig ring_config(double dt = 2e-4) {
    axisym::AxiRunConfig c;
    c.grid = {128, 128, 8.0, 8.0};
    c.ring = {2.0, 1.0, 0.5, -200.0, true};
    c.dt = dt;
    c.t_end = 0.5;
    c.phi = weights::WeightSpec::cylindrical(1.0);
    c.psi = weights::WeightSpec::cylindrical(1.0, weights::Form::one_plus_sq_half);
    c.cadence = 5;
    return c;
}

// ---------------------------------------------------------------------------
// 1. A_q census of power weights

inline CheckResult check_census(const Context& ctx) {
    CheckResult res;
    res.id = "1";
    res.budget = 60;
    Recorder rec{ctx, res};
    const auto cubes = weights::dyadic_cubes(weights::kDefaultScales);
    int mismatches = 0, cells = 0;
    std::vector<std::vector<double>> rows;
    for (int d : {2, 3})
        for (double g : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0})
            for (double q : {1.2, 1.5, 2.0}) {
                const auto e = weights::aq_estimate(weights::WeightSpec::radial(g, d), q, cubes);
                const bool expected = -d * (q - 1.0) < g && g < d;
                mismatches += e.is_finite() != expected;
                ++cells;
                rows.push_back({double(d), g, q, e.is_finite() ? 1.0 : 0.0, expected ? 1.0 : 0.0,
                                e.is_finite() ? e.value : INFINITY});
            }
    rec.file("census.csv", io::to_csv("d,gamma,q,finite,expected_finite,aq_value", rows));
    res.pass = mismatches == 0;
    res.detail = std::to_string(cells - mismatches) + "/" + std::to_string(cells) + " cells match -d(q-1) < gamma < d";
    res.data = {{"cells", cells}, {"mismatches", mismatches}};
    return res;
}

// ---------------------------------------------------------------------------
// 2. Adapted-weight table

inline CheckResult check_adapted_table(const Context& ctx) {
    CheckResult res;
    res.id = "2";
    res.budget = 120;
    Recorder rec{ctx, res};
    const auto scan = weights::default_r_scan();
    int mismatches = 0, cells = 0;
    std::vector<std::vector<double>> rows;
    for (int fam = 0; fam < 3; ++fam)
        for (double g : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
            const auto w = fam == 0   ? weights::WeightSpec::radial(g, 2)
                           : fam == 1 ? weights::WeightSpec::radial(g, 3)
                                      : weights::WeightSpec::cylindrical(g);
            // radial d=2: gamma < 2; radial d=3: gamma <= 2; cylindrical: gamma < 2
            const bool expected = fam == 1 ? g <= 2.0 : g < 2.0;
            const auto r = weights::check_adapted(w, scan);
            mismatches += r.adapted != expected;
            ++cells;
            rows.push_back({double(fam), g, r.adapted ? 1.0 : 0.0, expected ? 1.0 : 0.0, r.h1.pass ? 1.0 : 0.0,
                            r.h2.pass ? 1.0 : 0.0, r.h3.pass ? 1.0 : 0.0, r.h4.pass ? 1.0 : 0.0});
        }
    rec.file("adapted.csv", io::to_csv("family,gamma,adapted,expected,h1,h2,h3,h4", rows));
    res.pass = mismatches == 0;
    res.detail = std::to_string(cells - mismatches) + "/" + std::to_string(cells) +
                 " rows match (radial d=2: gamma<2, radial d=3: gamma<=2, cylindrical: gamma<2)";
    res.data = {{"cells", cells}, {"mismatches", mismatches}};
    return res;
}

// ---------------------------------------------------------------------------
// 3. Spectral identities on 64^2

inline spectral::Spectrum random_band(const spectral::PeriodicGrid& g, std::mt19937_64& rng, int kmax = 12) {
    std::normal_distribution<double> nd;
    spectral::Spectrum s(g);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.nc(); ++j)
            if (std::abs(g.mode(i)) <= kmax && j <= kmax) s(i, j) = {nd(rng), nd(rng)};
    // enforce a real field through a round trip
    return spectral::forward(spectral::inverse(s));
}

inline CheckResult check_spectral_identities(const Context& ctx) {
    CheckResult res;
    res.id = "3";
    res.budget = 10;
    const spectral::PeriodicGrid g{64, 2.0 * std::numbers::pi};
    std::mt19937_64 rng(ctx.seed_or(17));
    double idem = 0.0, grad = 0.0, pres = 0.0;
    using spectral::l2_norm_sq;
    for (int t = 0; t < 5; ++t) {
        const spectral::VecSpectrum u{random_band(g, rng), random_band(g, rng)};
        const spectral::VecSpectrum b{random_band(g, rng), random_band(g, rng)};
        const auto p = spectral::leray_project(u);
        const auto pp = spectral::leray_project(p);
        idem = std::max(idem, std::sqrt((l2_norm_sq(pp[0] - p[0]) + l2_norm_sq(pp[1] - p[1])) / l2_norm_sq(p)));
        const auto f = random_band(g, rng);
        const auto gf = spectral::gradient(f);
        grad = std::max(grad, std::sqrt(l2_norm_sq(spectral::leray_project(gf)) / l2_norm_sq(gf)));
        const auto pr = spectral::pressure_field(u, b);
        spectral::Spectrum dd(g);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                dd += spectral::derivative(spectral::derivative(spectral::dealiased_product(b[i], u[j]), i), j);
        pres = std::max(pres, std::sqrt(l2_norm_sq(spectral::laplacian(pr) + dd) / l2_norm_sq(dd)));
    }
    res.pass = idem < 1e-10 && grad < 1e-10 && pres < 1e-10;
    res.detail = "idempotence " + fmt(idem) + ", gradient " + fmt(grad) + ", pressure " + fmt(pres) + " (< 1e-10)";
    res.data = {{"idempotence", idem}, {"gradient", grad}, {"pressure", pres}};
    return res;
}

// ---------------------------------------------------------------------------
// 4. Taylor-Green regression and energy equality

inline CheckResult check_taylor_green(const Context& ctx) {
    CheckResult res;
    res.id = "4";
    res.budget = 60;
    Recorder rec{ctx, res};
    solver2d::RunConfig cfg;  // n = 64, dt = 1e-3, t_end = 1
    const auto u0 = solver2d::initial_state(cfg);
    solver2d::Ledger ledger;
    const auto s = solver2d::run(cfg, ledger);
    double num = 0.0, den = 0.0;
    const double decay = std::exp(-2.0 * s.t);
    for (int c = 0; c < 2; ++c) {
        auto want = u0.u[c];
        want *= decay;
        num += spectral::l2_norm_sq(s.u[c] - want);
        den += spectral::l2_norm_sq(want);
    }
    const double err = std::sqrt(num / den);
    const double e0 = ledger.rows.front().e_u_l2;
    double drift = 0.0;
    for (const auto& r : ledger.rows) drift = std::max(drift, std::abs(r.e_u_l2 + 2.0 * r.diss_cum - e0) / e0);
    rec.file("taylor_green.csv", io::to_csv(ledger));
    res.pass = err < 1e-6 && drift < 1e-6;
    res.detail = "relative L2 error at t=1 " + fmt(err) + ", energy drift " + fmt(drift) + " (< 1e-6)";
    res.data = {{"l2_error", err}, {"energy_drift", drift}};
    return res;
}

// ---------------------------------------------------------------------------
// 5. Uniformity of the minimal weighted-energy constant

inline CheckResult check_pc_uniformity(const Context& ctx) {
    CheckResult res;
    res.id = "5";
    res.budget = 900;
    Recorder rec{ctx, res};
    json runs = json::array();
    std::vector<double> cs;
    for (int n : {64, 128})
        for (double eps : {0.4, 0.2, 0.1}) {
            solver2d::Ledger ledger;
            solver2d::run(binding_config(n, eps, 5e-4, ctx.seed_or(3)), ledger);
            const auto pc = solver2d::verify_pc(ledger, 0.0, 2);
            cs.push_back(pc.c_min);
            runs.push_back({{"n", n}, {"epsilon", eps}, {"c_min", pc.c_min}});
            rec.file("pc_n" + std::to_string(n) + "_eps" + fmt(eps) + ".csv", io::to_csv(ledger));
        }
    const double ref = cs.back();  // finest grid, smallest epsilon
    double worst = 0.0;
    for (double c : cs) worst = std::max(worst, std::abs(c / ref - 1.0));
    res.pass = ref > 0.0 && std::isfinite(ref) && worst <= 0.2;
    res.detail = "c_min in [" + fmt(*std::min_element(cs.begin(), cs.end())) + ", " +
                 fmt(*std::max_element(cs.begin(), cs.end())) + "], max deviation " + fmt(100 * worst, 3) +
                 "% of the n=128, eps=0.1 value (<= 20%)";
    res.data = {{"runs", runs}, {"max_rel_deviation", worst}};
    return res;
}

// ---------------------------------------------------------------------------
// 6. Nonlinear Gronwall sweep with the stated T0

inline CheckResult check_gronwall_sweep(const Context& ctx, bool corrected = false) {
    CheckResult res;
    res.id = corrected ? "lemma5-corrected" : "6";
    res.budget = 30;
    Recorder rec{ctx, res};
    int failed = 0;
    std::vector<std::vector<double>> rows;
    std::string first_fail;
    for (const auto& cell : gronwall::sweep(1.0, 100000, corrected)) {
        const auto& r = cell.report;
        if (!r.pass()) {
            ++failed;
            if (first_fail.empty())
                first_fail = "; e.g. A=" + fmt(cell.params.A) + " B=" + fmt(cell.params.B) + " b=" + fmt(cell.params.b) +
                             ": max alpha/A " + fmt(r.max_ratio) + " on [0, " + fmt(r.t0) + "], T* product " +
                             fmt(r.crossing_product);
        }
        rows.push_back({cell.params.A, cell.params.B, cell.params.b, r.t0, r.max_ratio, r.crossing_time,
                        r.crossing_product, r.pass() ? 1.0 : 0.0});
    }
    rec.file(corrected ? "sweep_corrected.csv" : "sweep.csv",
             io::to_csv("A,B,b,t0,max_ratio,crossing_time,crossing_product,pass", rows));
    res.pass = failed == 0;
    res.detail = std::to_string(27 - failed) + "/27 triples keep alpha <= 3A with the crossing bound" + first_fail;
    res.data = {{"failed", failed}};
    return res;
}

// ---------------------------------------------------------------------------
// 7. Monotonicity of the integral of eta^2 r on the ring preset

inline CheckResult check_ladyzhenskaya(const Context& ctx) {
    CheckResult res;
    res.id = "7";
    res.budget = 600;
    Recorder rec{ctx, res};
    axisym::AxiLedger ledger;
    axisym::run(ring_config(), ledger);
    const auto rep = axisym::ladyzhenskaya_monitor(ledger, 1e-6);
    rec.file("ring.csv", io::to_csv(ledger));
    res.pass = rep.pass() && !ledger.blew_up;
    res.detail = "largest relative increase between rows " + fmt(rep.worst_increase) + " (<= 1e-6), 2pi q(0) = " +
                 fmt(2 * std::numbers::pi * ledger.rows.front().lady_q, 6) + " vs |grad w0|^2 = " +
                 fmt(ledger.grad_omega0_sq, 6);
    res.data = {{"worst_increase", rep.worst_increase}, {"monotone", rep.monotone}, {"bounded", rep.bounded},
                {"rows", ledger.rows.size()}};
    return res;
}

// ---------------------------------------------------------------------------
// 8. Weighted vorticity constant under dt halving, plus the pair conditions

inline CheckResult check_coe1(const Context& ctx) {
    CheckResult res;
    res.id = "8";
    res.budget = 900;
    Recorder rec{ctx, res};
    std::vector<double> cs;
    bool finite = true, pair = true;
    for (double dt : {2e-4, 1e-4}) {
        const auto cfg = ring_config(dt);
        axisym::AxiLedger ledger;
        axisym::run(cfg, ledger);
        const auto rep = axisym::verify_coe1(ledger, cfg.phi, cfg.psi);
        finite = finite && rep.finite && std::isfinite(rep.c_min) && !ledger.blew_up;
        pair = pair && rep.pair.pass;
        cs.push_back(rep.c_min);
        rec.file("ring_dt" + fmt(dt) + ".csv", io::to_csv(ledger));
    }
    const double dev = cs[1] > 0.0 ? std::abs(cs[0] / cs[1] - 1.0) : (cs[0] == 0.0 ? 0.0 : INFINITY);
    res.pass = finite && pair && dev <= 0.25;
    res.detail = "C' = " + fmt(cs[0]) + " (dt=2e-4), " + fmt(cs[1]) + " (dt=1e-4), deviation " + fmt(100 * dev, 3) +
                 "% (<= 25%), pair conditions " + (pair ? "pass" : "fail");
    res.data = {{"c_min", cs}, {"deviation", dev}, {"pair", pair}};
    return res;
}

// ---------------------------------------------------------------------------
// 9. Mollifier ratio uniform in epsilon

inline CheckResult check_mollifier_ladder(const Context& ctx) {
    CheckResult res;
    res.id = "9";
    res.budget = 60;
    Recorder rec{ctx, res};
    const spectral::PeriodicGrid g{256, 24.0};
    const auto phi = spectral::weight_field(g, weights::WeightSpec::radial(1.0, 2));
    const auto probes = spectral::weighted_probes(g, phi, 100, ctx.seed_or(29));
    const std::vector<double> ladder{2.0, 1.0, 0.5, 0.25, 0.125};
    const auto worst = spectral::mollifier_ratio_ladder(probes, phi, ladder, spectral::Shape::compact_bump);
    // the constant probe pins the maximum at 1; the rest show how far below it the others sit
    const std::vector<spectral::Field> bumps(probes.begin() + 1, probes.end());
    const auto rest = spectral::mollifier_ratio_ladder(bumps, phi, ladder, spectral::Shape::compact_bump);
    bool monotone = true;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < worst.size(); ++i) {
        if (i > 0 && worst[i] > worst[i - 1] * (1.0 + 1e-12)) monotone = false;
        rows.push_back({ladder[i], worst[i], rest[i]});
    }
    rec.file("mollifier_ladder.csv", io::to_csv("epsilon,max_ratio,max_ratio_nonconstant", rows));
    res.pass = monotone;
    std::string ws, rs;
    for (double w : worst) ws += (ws.empty() ? "" : ", ") + fmt(w, 8);
    for (double w : rest) rs += (rs.empty() ? "" : ", ") + fmt(w, 6);
    res.detail = "max ratio over 100 fields for eps = 2..0.125: " + ws + (monotone ? " (non-increasing)" : " (increases)") +
                 "; without the constant field: " + rs;
    res.data = {{"epsilon", ladder}, {"max_ratio", worst}, {"max_ratio_nonconstant", rest}};
    return res;
}

// ---------------------------------------------------------------------------
// Auxiliary checks used by presets

inline CheckResult check_vorticity_2d(const Context& ctx) {
    CheckResult res;
    res.id = "vorticity-2d";
    res.budget = 120;
    Recorder rec{ctx, res};
    std::vector<double> cs;
    bool cont = true;
    for (double dt : {5e-4, 2.5e-4}) {
        solver2d::Ledger ledger;
        solver2d::run(binding_config(64, 0.4, dt, ctx.seed_or(3)), ledger);
        const auto rep = solver2d::verify_vorticity_2d(ledger);
        cs.push_back(rep.c_min);
        cont = cont && solver2d::continuity_at_zero(ledger).pass;
        rec.file("vorticity_dt" + fmt(dt) + ".csv", io::to_csv(ledger));
    }
    const double dev = cs[1] > 0.0 ? std::abs(cs[0] / cs[1] - 1.0) : (cs[0] == 0.0 ? 0.0 : INFINITY);
    res.pass = std::isfinite(cs[0]) && dev <= 0.1 && cont;
    res.detail = "vorticity constant " + fmt(cs[0]) + " / " + fmt(cs[1]) + " under dt halving (deviation " +
                 fmt(100 * dev, 3) + "%, <= 10%), continuity at t=0 " + (cont ? "pass" : "fail");
    res.data = {{"c_min", cs}, {"deviation", dev}, {"continuity", cont}};
    return res;
}

inline CheckResult check_weight_pair(const Context&) {
    CheckResult res;
    res.id = "weight-pair";
    res.budget = 30;
    const auto phi = weights::WeightSpec::cylindrical(1.0);
    const auto psi = weights::WeightSpec::cylindrical(1.0, weights::Form::one_plus_sq_half);
    const auto r = weights::check_pair(phi, psi, weights::radial_cloud(3));
    res.pass = r.pass;
    res.detail = "Phi=(1+r)^-1, Psi=(1+r^2)^-1/2: ordering " + std::string(r.ordering ? "ok" : "fails") +
                 ", Psi in A2 (" + fmt(r.a2_constant) + "), |grad Psi| <= " + fmt(r.gradient_constant) +
                 " sqrt(Phi) Psi, |Lap Psi| <= " + fmt(r.laplacian_constant) + " Phi Psi";
    res.data = {{"ordering", r.ordering}, {"a2_constant", r.a2_constant}, {"gradient_constant", r.gradient_constant},
                {"laplacian_constant", r.laplacian_constant}};
    return res;
}

inline CheckResult check_stretching(const Context&) {
    CheckResult res;
    res.id = "stretching";
    res.budget = 60;
    auto s = axisym::vortex_ring({128, 128, 8.0, 8.0}, {2.0, 0.0, 0.5, 10.0});
    for (int k = 0; k < 100; ++k) s = axisym::step_axi(s, 1e-3);
    const double computed = axisym::stretching_identity_check(s, 0.5).residual;
    const axisym::MeridionalField w = [](double r, double z) { return r * std::exp(-r * r - z * z); };
    const double c = 1.0 / std::sqrt(2.0);
    const double coarse = axisym::stretching_identity_check(w, 0.04, c, 0.0, 0.4).residual;
    const double fine = axisym::stretching_identity_check(w, 0.02, c, 0.0, 0.4).residual;
    res.pass = computed < 1e-2 && std::abs(coarse / fine - 4.0) < 0.4;
    res.detail = "stretching residual on the computed ring " + fmt(computed) + " (< 1e-2); refinement ratio " +
                 fmt(coarse / fine) + " (about 4)";
    res.data = {{"computed", computed}, {"ratio", coarse / fine}};
    return res;
}

}  // namespace wlns::harness
