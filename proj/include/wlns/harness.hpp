#pragma once
// Presets, run directories and manifests. A run directory is never reused: a clash gets a -k suffix.

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wlns/config.hpp"
#include "wlns/criteria.hpp"
#include "wlns/io.hpp"

namespace wlns::harness {

inline constexpr const char* kVersion = "wlns 0.1.0";
inline constexpr int kSchemaVersion = 1;

using CheckFn = CheckResult (*)(const Context&);

struct CheckDef {
    std::string id;
    std::string title;
    CheckFn fn;
};

inline CheckResult check_determinism(const Context& ctx);

inline const std::vector<CheckDef>& checks() {
    static const std::vector<CheckDef> all = {
        {"1", "A_q census of power weights", check_census},
        {"2", "adapted-weight table", check_adapted_table},
        {"3", "Leray projector and pressure identities", check_spectral_identities},
        {"4", "Taylor-Green decay and energy equality", check_taylor_green},
        {"5", "weighted energy constant uniform in n and epsilon", check_pc_uniformity},
        {"6", "nonlinear Gronwall sweep with the stated T0", [](const Context& c) { return check_gronwall_sweep(c); }},
        {"7", "monotone integral of eta^2 r for colliding rings", check_ladyzhenskaya},
        {"8", "weighted vorticity constant under dt halving", check_coe1},
        {"9", "weighted mollifier ratio uniform in epsilon", check_mollifier_ladder},
        {"10", "bitwise-identical repeated preset", check_determinism},
        {"vorticity-2d", "2D weighted vorticity constant under dt halving", check_vorticity_2d},
        {"weight-pair", "cylindrical weight pair conditions", check_weight_pair},
        {"stretching", "vortex stretching identity", check_stretching},
        {"lemma5-corrected", "Gronwall sweep with T0 divided by B",
         [](const Context& c) { return check_gronwall_sweep(c, true); }},
    };
    return all;
}

inline const CheckDef* find_check(const std::string& id) {
    for (const auto& c : checks())
        if (c.id == id) return &c;
    return nullptr;
}

inline const std::map<std::string, std::vector<std::string>>& presets() {
    static const std::map<std::string, std::vector<std::string>> p = {
        {"weights-census", {"1", "2"}},
        {"thm1-energy", {"3", "4", "5", "9"}},
        {"thm2-vorticity-2d", {"vorticity-2d"}},
        {"thm3-axisym-local", {"7", "stretching"}},
        {"thm4-weight-pair", {"weight-pair", "8"}},
        {"lemma5-sweep", {"6", "lemma5-corrected"}},
    };
    return p;
}

struct UnknownPreset : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Run directories

inline std::string timestamp(std::chrono::system_clock::time_point tp, const char* format) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::strftime(buf, sizeof buf, format, &tm);
    return buf;
}

inline std::string iso_time(std::chrono::system_clock::time_point tp) { return timestamp(tp, "%Y-%m-%dT%H:%M:%SZ"); }

/// --output, then WLNS_OUTPUT_ROOT, then ./wlns-runs
inline std::filesystem::path output_root(const std::optional<std::string>& flag) {
    if (flag && !flag->empty()) return *flag;
    if (const char* env = std::getenv("WLNS_OUTPUT_ROOT"); env && *env) return env;
    return "wlns-runs";
}

inline std::filesystem::path make_run_dir(const std::filesystem::path& root, const std::string& name,
                                          std::chrono::system_clock::time_point now = std::chrono::system_clock::now()) {
    std::filesystem::create_directories(root);
    const std::string base = name + "-" + timestamp(now, "%Y%m%d-%H%M%S");
    for (int k = 0;; ++k) {
        const auto dir = root / (k == 0 ? base : base + "-" + std::to_string(k));
        if (std::filesystem::create_directory(dir)) return dir;
    }
}

struct Manifest {
    std::string kind;  // preset name or simulate-2d / simulate-axisym
    std::string config_text;
    std::optional<std::uint64_t> seed;
    std::string started, finished;
    std::vector<std::string> files;

    json to_json() const {
        json j = {{"schema_version", kSchemaVersion},
                  {"version", kVersion},
                  {"kind", kind},
                  {"config_hash", config::hex64(config::fnv1a(config_text))},
                  {"started", started},
                  {"finished", finished},
                  {"files", files}};
        j["seed"] = seed ? json(*seed) : json(nullptr);
        return j;
    }
};

inline json to_json(const CheckResult& r) {
    const auto* def = find_check(r.id);
    return {{"id", r.id},        {"title", def ? def->title : ""}, {"pass", r.pass},
            {"detail", r.detail}, {"seconds", r.seconds},           {"budget_seconds", r.budget},
            {"within_budget", r.within_budget()}, {"data", r.data}, {"files", r.files}};
}

inline CheckResult run_check(const CheckDef& def, const Context& ctx) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
        r = def.fn(ctx);
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.id = def.id;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!r.within_budget()) {
        r.pass = false;
        r.detail += "; took " + fmt(r.seconds, 3) + " s, budget " + fmt(r.budget, 3) + " s";
    }
    return r;
}

/// Runs the given checks, at most `threads` at a time; results keep the input order.
inline std::vector<CheckResult> run_checks(const std::vector<std::string>& ids, const Context& ctx, int threads = 1) {
    std::vector<CheckResult> out(ids.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i; (i = next++) < ids.size();) {
            const auto* def = find_check(ids[i]);
            require(def != nullptr, "unknown check '" + ids[i] + "'");
            out[i] = run_check(*def, ctx);
        }
    };
    const int n = std::max(1, std::min<int>(threads, static_cast<int>(ids.size())));
    if (n == 1) {
        worker();
        return out;
    }
    std::vector<std::thread> pool;
    for (int k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return out;
}

struct PresetOutcome {
    std::filesystem::path dir;
    std::vector<CheckResult> results;
    bool pass() const {
        for (const auto& r : results)
            if (!r.pass) return false;
        return true;
    }
};

inline std::string preset_config_text(const std::string& name, const std::optional<std::uint64_t>& seed) {
    std::string text = "preset=" + name + "\n";
    for (const auto& id : presets().at(name)) text += "check=" + id + "\n";
    text += "seed=" + (seed ? std::to_string(*seed) : std::string("default")) + "\n";
    return text;
}

/// Writes report.json and manifest.json next to the check artifacts in a fresh run directory.
inline PresetOutcome run_preset(const std::string& name, const std::filesystem::path& root,
                                const std::optional<std::uint64_t>& seed = {}, int threads = 1) {
    const auto it = presets().find(name);
    if (it == presets().end()) throw UnknownPreset("unknown preset '" + name + "'");
    Manifest m{name, preset_config_text(name, seed), seed, iso_time(std::chrono::system_clock::now()), "", {}};
    PresetOutcome out;
    out.dir = make_run_dir(root, name);
    out.results = run_checks(it->second, Context{out.dir, seed}, threads);
    json report = {{"schema_version", kSchemaVersion}, {"preset", name}, {"checks", json::array()}};
    for (const auto& r : out.results) {
        report["checks"].push_back(to_json(r));
        m.files.insert(m.files.end(), r.files.begin(), r.files.end());
    }
    report["pass"] = out.pass();
    io::write_text(out.dir / "config.txt", m.config_text);
    io::write_text(out.dir / "report.json", report.dump(2) + "\n");
    m.files.insert(m.files.begin(), {"config.txt", "report.json"});
    m.finished = iso_time(std::chrono::system_clock::now());
    io::write_text(out.dir / "manifest.json", m.to_json().dump(2) + "\n");
    return out;
}

// ---------------------------------------------------------------------------
// 10. Determinism: the same preset twice gives byte-identical ledgers

inline CheckResult check_determinism(const Context& ctx) {
    CheckResult res;
    res.id = "10";
    res.budget = 600;
    const auto tmp = std::filesystem::temp_directory_path() /
                     ("wlns-determinism-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    std::vector<PresetOutcome> runs;
    for (int k = 0; k < 2; ++k) runs.push_back(run_preset("thm2-vorticity-2d", tmp / std::to_string(k), ctx.seed));
    int compared = 0, differing = 0;
    for (const auto& r : runs[0].results)
        for (const auto& f : r.files) {
            if (!f.ends_with(".csv")) continue;
            ++compared;
            differing += io::read_text(runs[0].dir / f) != io::read_text(runs[1].dir / f);
        }
    std::filesystem::remove_all(tmp);
    res.pass = compared > 0 && differing == 0;
    res.detail = std::to_string(compared - differing) + "/" + std::to_string(compared) +
                 " ledger files byte-identical across two runs of thm2-vorticity-2d";
    res.data = {{"compared", compared}, {"differing", differing}};
    return res;
}

// ---------------------------------------------------------------------------
// Single simulations

struct SimOutcome {
    std::filesystem::path dir;
    bool blew_up = false;
    double last_valid_time = 0.0;
};

template <class Cfg, class Ledger, class RunFn>
SimOutcome simulate(const std::string& kind, const Cfg& cfg, const config::Schema<Cfg>& schema,
                    const std::filesystem::path& root, std::optional<std::uint64_t> seed, RunFn&& run_fn) {
    Manifest m{kind, config::canonical(cfg, schema), seed, iso_time(std::chrono::system_clock::now()), "", {}};
    SimOutcome out;
    out.dir = make_run_dir(root, kind);
    io::write_text(out.dir / "config.txt", m.config_text);
    m.files.push_back("config.txt");
    Ledger ledger;
    const auto save = [&](const auto& state, long step) {
        const std::string name = "checkpoint_" + std::to_string(step) + ".bin";
        io::save(out.dir / name, state);
        m.files.push_back(name);
    };
    const auto finish = [&] {
        io::write_text(out.dir / "ledger.csv", io::to_csv(ledger));
        m.files.push_back("ledger.csv");
        m.finished = iso_time(std::chrono::system_clock::now());
        io::write_text(out.dir / "manifest.json", m.to_json().dump(2) + "\n");
        out.blew_up = ledger.blew_up;
        out.last_valid_time = ledger.last_valid_time;
    };
    try {
        const auto final_state = run_fn(ledger, save);
        io::save(out.dir / "final.bin", final_state);
        m.files.push_back("final.bin");
    } catch (const BlowUpError&) {
        finish();
        return out;
    }
    finish();
    return out;
}

inline SimOutcome simulate_2d(solver2d::RunConfig cfg, const std::filesystem::path& root,
                              std::optional<std::uint64_t> seed = {}) {
    if (seed) cfg.seed = *seed;
    cfg.validate();
    return simulate<solver2d::RunConfig, solver2d::Ledger>(
        "simulate-2d", cfg, config::schema_2d(), root, cfg.seed, [&](solver2d::Ledger& l, const auto& save) {
            return solver2d::run(cfg, l, [&](const solver2d::State& s, long k) { save(s, k); });
        });
}

inline SimOutcome simulate_axi(const axisym::AxiRunConfig& cfg, const std::filesystem::path& root) {
    cfg.validate();
    return simulate<axisym::AxiRunConfig, axisym::AxiLedger>(
        "simulate-axisym", cfg, config::schema_axi(), root, std::nullopt, [&](axisym::AxiLedger& l, const auto& save) {
            return axisym::run(cfg, l, [&](const axisym::AxiState& s, int k) {
                if (cfg.checkpoint_every > 0 && k % cfg.checkpoint_every == 0) save(s, k);
            });
        });
}

}  // namespace wlns::harness
