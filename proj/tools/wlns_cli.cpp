// wlns: weight checks, simulations, Gronwall tools and presets.
// Exit codes: 0 success, 1 a check failed or a run blew up, 2 bad usage or input.

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "wlns/config.hpp"
#include "wlns/gronwall.hpp"
#include "wlns/harness.hpp"
#include "wlns/io.hpp"
#include "wlns/weights.hpp"

using namespace wlns;
using json = nlohmann::json;

namespace {

struct WeightArgs {
    std::string family = "radial";
    double gamma = 1.0;
    int dim = 3;
    std::string form = "abs";

    weights::WeightSpec spec() const {
        const auto f = config::parse_form(form);
        if (family == "radial") return weights::WeightSpec::radial(gamma, dim, f);
        if (family == "cylindrical") return weights::WeightSpec::cylindrical(gamma, f);
        if (family == "constant") return weights::WeightSpec::constant(dim);
        throw ConfigError("unknown weight family '" + family + "'", "family", 0);
    }
};

void add_weight_options(CLI::App* app, WeightArgs& w, const std::string& prefix = "") {
    app->add_option("--" + prefix + "family", w.family, "radial | cylindrical | constant")->capture_default_str();
    app->add_option("--" + prefix + "gamma", w.gamma, "decay exponent")->capture_default_str();
    app->add_option("--" + prefix + "dim", w.dim, "space dimension (radial, constant)")->capture_default_str();
    app->add_option("--" + prefix + "form", w.form, "abs | sq")->capture_default_str();
}

json axiom_json(const weights::AxiomResult& a) {
    return {{"axiom", a.axiom}, {"pass", a.pass}, {"constant", a.constant}, {"evidence_scale", a.evidence_scale}};
}

json envelope_json(const gronwall::GronwallParams& p, const gronwall::EnvelopeReport& r) {
    const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return {{"A", p.A},
            {"B", p.B},
            {"b", p.b},
            {"T1", p.T1},
            {"t0", r.t0},
            {"max_ratio", r.max_ratio},
            {"holds", r.holds},
            {"blew_up", r.blew_up},
            {"crossing_time", num(r.crossing_time)},
            {"crossing_product", num(r.crossing_product)},
            {"pass", r.pass()}};
}

void emit(json j) {
    j["schema_version"] = harness::kSchemaVersion;
    std::cout << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted Navier-Stokes estimate checks"};
    app.require_subcommand(1);
    std::optional<std::string> output;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    app.add_option("--output", output, "run directory root (default $WLNS_OUTPUT_ROOT or ./wlns-runs)");
    app.add_option("--seed", seed, "override random seeds");
    app.add_option("--threads", threads, "checks run concurrently within a preset")->check(CLI::PositiveNumber);
    app.set_version_flag("--version", harness::kVersion);

    int rc = 0;

    // weights
    auto* weights_cmd = app.add_subcommand("weights", "weight axioms and Muckenhoupt estimates");
    weights_cmd->require_subcommand(1);
    WeightArgs w_check;
    auto* w_check_cmd = weights_cmd->add_subcommand("check", "test the four adapted-weight axioms");
    add_weight_options(w_check_cmd, w_check);
    w_check_cmd->callback([&] {
        const auto rep = weights::check_adapted(w_check.spec(), weights::default_r_scan());
        json axioms = json::array();
        for (const auto& a : rep.all()) axioms.push_back(axiom_json(a));
        emit({{"adapted", rep.adapted}, {"h3_exponent", rep.h3_exponent}, {"axioms", axioms}});
        rc = rep.adapted ? 0 : 1;
    });
    WeightArgs w_aq;
    double q = 2.0;
    auto* w_aq_cmd = weights_cmd->add_subcommand("aq", "estimate the A_q constant on dyadic cubes");
    add_weight_options(w_aq_cmd, w_aq);
    w_aq_cmd->add_option("--q", q, "Muckenhoupt exponent (> 1)")->capture_default_str();
    w_aq_cmd->callback([&] {
        const auto e = weights::aq_estimate(w_aq.spec(), q, weights::dyadic_cubes(weights::kDefaultScales));
        emit({{"q", q},
              {"status", weights::to_string(e.status)},
              {"value", e.is_finite() ? json(e.value) : json(nullptr)},
              {"per_scale", e.per_scale}});
        rc = e.is_finite() ? 0 : 1;
    });
    WeightArgs w_phi{"cylindrical", 1.0, 3, "abs"}, w_psi{"cylindrical", 1.0, 3, "sq"};
    auto* w_pair_cmd = weights_cmd->add_subcommand("pair", "test the conditions on a (Phi, Psi) pair");
    add_weight_options(w_pair_cmd, w_phi, "phi-");
    add_weight_options(w_pair_cmd, w_psi, "psi-");
    w_pair_cmd->callback([&] {
        const auto r = weights::check_pair(w_phi.spec(), w_psi.spec(), weights::radial_cloud(3));
        emit({{"ordering", r.ordering},
              {"psi_in_a2", r.psi_in_a2},
              {"a2_constant", r.a2_constant},
              {"gradient_bound", r.gradient_bound},
              {"gradient_constant", r.gradient_constant},
              {"laplacian_bound", r.laplacian_bound},
              {"laplacian_constant", r.laplacian_constant},
              {"pass", r.pass}});
        rc = r.pass ? 0 : 1;
    });

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "run a solver from a key=value config");
    sim_cmd->require_subcommand(1);
    std::string cfg_2d, cfg_axi;
    const auto report_sim = [&](const harness::SimOutcome& o) {
        emit({{"dir", o.dir.string()}, {"blew_up", o.blew_up}, {"last_valid_time", o.last_valid_time}});
        rc = o.blew_up ? 1 : 0;
    };
    auto* sim2d = sim_cmd->add_subcommand("2d", "periodic 2D solver");
    sim2d->add_option("--config", cfg_2d, "config file")->required();
    sim2d->callback([&] {
        const auto cfg = config::parse_config(io::read_text(cfg_2d));
        report_sim(harness::simulate_2d(cfg, harness::output_root(output), seed));
    });
    auto* simaxi = sim_cmd->add_subcommand("axisym", "axisymmetric swirl-free solver");
    simaxi->add_option("--config", cfg_axi, "config file")->required();
    simaxi->callback([&] {
        const auto cfg = config::parse_axi_config(io::read_text(cfg_axi));
        report_sim(harness::simulate_axi(cfg, harness::output_root(output)));
    });

    // gronwall
    auto* gw_cmd = app.add_subcommand("gronwall", "nonlinear Gronwall bound");
    gw_cmd->require_subcommand(1);
    gronwall::GronwallParams gp;
    bool corrected = false;
    auto* gw_verify = gw_cmd->add_subcommand("verify", "integrate the extremal trajectory up to T0");
    gw_verify->add_option("--A", gp.A)->capture_default_str();
    gw_verify->add_option("--B", gp.B)->capture_default_str();
    gw_verify->add_option("--b", gp.b)->capture_default_str();
    gw_verify->add_option("--T1", gp.T1)->capture_default_str();
    gw_verify->add_flag("--corrected", corrected, "divide T0 by B");
    gw_verify->callback([&] {
        const auto r = gronwall::verify_envelope(gp, 100000, corrected);
        emit(envelope_json(gp, r));
        rc = r.pass() ? 0 : 1;
    });
    std::string ledger_path, column = "e_phi_u";
    double fit_b = 2.0;
    auto* gw_fit = gw_cmd->add_subcommand("fit", "smallest B whose envelope contains a ledger column");
    gw_fit->add_option("--ledger", ledger_path, "ledger CSV")->required();
    gw_fit->add_option("--b", fit_b, "nonlinear exponent")->capture_default_str();
    gw_fit->add_option("--column", column, "ledger column for alpha")->capture_default_str();
    gw_fit->callback([&] {
        const auto table = io::read_csv(ledger_path);
        const auto t = table.column("t"), a = table.column(column);
        const auto f = gronwall::fit_envelope(t, a, fit_b);
        emit({{"A_fit", f.A_fit},
              {"B_fit", f.B_fit},
              {"t0", f.t0},
              {"within_3A", f.within_3A},
              {"binding_row", f.binding_row}});
        rc = f.within_3A ? 0 : 1;
    });

    // preset
    std::string preset_name;
    auto* preset_cmd = app.add_subcommand("preset", "run a named group of checks into a new run directory");
    std::string names;
    for (const auto& [name, ids] : harness::presets()) names += (names.empty() ? "" : ", ") + name;
    preset_cmd->add_option("name", preset_name, names)->required();
    preset_cmd->callback([&] {
        const auto out = harness::run_preset(preset_name, harness::output_root(output), seed, threads);
        for (const auto& r : out.results)
            std::cout << (r.pass ? "PASS " : "FAIL ") << r.id << ": " << r.detail << "\n";
        std::cout << "run directory: " << out.dir.string() << "\n";
        rc = out.pass() ? 0 : 1;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const harness::UnknownPreset& e) {
        std::cerr << "wlns: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "wlns: config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "wlns: " << e.what() << "\n";
        return 2;
    } catch (const ContractError& e) {
        std::cerr << "wlns: invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "wlns: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
