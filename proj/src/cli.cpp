#include "ehrelay/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ehrelay/analytic.hpp"
#include "ehrelay/params.hpp"
#include "ehrelay/protocols.hpp"
#include "ehrelay/sim.hpp"
#include "ehrelay/specfun.hpp"
#include "ehrelay/study.hpp"

namespace ehrelay {

namespace {

using nlohmann::json;

// Raised for argument combinations CLI11 cannot check on its own.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::string config_path;
    std::optional<double> pr_dbm;
    std::optional<double> gamma_o_db;
    std::optional<double> sigma_nr_dbm;
    std::optional<double> sigma_nd_dbm;
    std::optional<std::uint64_t> seed;
    int truncation_n = 10;
    double quad_tol = 1e-9;
    unsigned workers = 1;
};

void add_common(CLI::App* sub, CommonOptions& c) {
    sub->add_option("--config", c.config_path, "JSON config with dB/dBm keys")
        ->check(CLI::ExistingFile);
    sub->add_option("--pr-dbm", c.pr_dbm, "Relay transmit power [dBm] (default 0)");
    sub->add_option("--gamma-o-db", c.gamma_o_db, "SNR threshold [dB] (default 60)");
    sub->add_option("--sigma-nr-dbm", c.sigma_nr_dbm, "Relay noise power [dBm] (default -70)");
    sub->add_option("--sigma-nd-dbm", c.sigma_nd_dbm,
                    "Destination noise power [dBm] (default -100)");
    sub->add_option("--seed", c.seed, "Random seed (default 1, or the config's seed)");
    sub->add_option("--truncation-n", c.truncation_n, "Series terms for the continuous-DF bound")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--quad-tol", c.quad_tol, "Relative quadrature tolerance")
        ->capture_default_str()
        ->check(CLI::Range(1e-14, 1e-2));
    sub->add_option("--workers", c.workers, "Worker threads")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

struct Resolved {
    SystemParams params;
    std::uint64_t seed = 1;
};

Resolved resolve(const CommonOptions& c) {
    DbConfig cfg = default_db_config();
    std::uint64_t seed = 1;
    if (!c.config_path.empty()) {
        for (const auto& [k, v] : load_db_config_file(c.config_path)) {
            if (k == "seed") {
                if (!(v >= 0.0) || v != std::floor(v)) {
                    throw ParamError("invariant violated: seed is a non-negative integer");
                }
                seed = static_cast<std::uint64_t>(v);
            } else {
                cfg[k] = v;
            }
        }
    }
    if (c.pr_dbm) cfg["pr_dbm"] = *c.pr_dbm;
    if (c.gamma_o_db) cfg["gamma_o_db"] = *c.gamma_o_db;
    if (c.sigma_nr_dbm) cfg["sigma_nr_dbm"] = *c.sigma_nr_dbm;
    if (c.sigma_nd_dbm) cfg["sigma_nd_dbm"] = *c.sigma_nd_dbm;
    if (c.seed) seed = *c.seed;
    return {from_db_config(cfg), seed};
}

const std::vector<std::string> kProtocolNames = {"af_cont", "af_disc", "df_cont", "df_disc",
                                                 "baseline"};

std::vector<ProtocolId> closed_form_protocols() {
    return {ProtocolId::AF_CONT, ProtocolId::AF_DISC, ProtocolId::DF_CONT, ProtocolId::DF_DISC};
}

// Comma-separated protocol list, or "all" for the four protocols with closed forms.
std::vector<ProtocolId> parse_protocol_list(const std::string& text) {
    if (text == "all") return closed_form_protocols();
    std::vector<ProtocolId> ids;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            ids.push_back(parse_protocol(item));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    if (ids.empty()) throw UsageError("empty protocol list");
    return ids;
}

std::vector<double> parse_number_list(const std::string& text, char sep) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("not a number: '" + item + "'");
        }
    }
    return v;
}

json params_json(const SystemParams& p) {
    json j;
    for (const auto& [k, v] : to_db_config(p)) j[k] = v;
    return j;
}

json sim_json(const SimResult& r) {
    const auto& t = r.tallies;
    return {{"mean_tau", r.mean_tau},
            {"std_error", r.std_error},
            {"n_blocks", r.n_blocks},
            {"tallies",
             {{"it_block_fraction", t.it_block_fraction},
              {"relay_outage_rate", t.relay_outage_rate},
              {"dest_outage_rate", t.dest_outage_rate},
              {"patterns", t.x_stats.count},
              {"mean_X", t.mean_X},
              {"mean_Y", t.mean_Y},
              {"eo_samples", t.eo_samples.size()}}},
            {"energy",
             {{"harvested", r.total_harvested},
              {"consumed", r.total_consumed},
              {"final_battery", r.final_battery}}}};
}

void emit_csv(const std::string& path, std::ostream& out, SweepAxis axis,
              const std::vector<SweepRow>& rows) {
    if (path.empty()) {
        write_csv(out, axis, rows);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write output file: " + path);
    write_csv(f, axis, rows);
    if (!f) throw std::runtime_error("failed while writing output file: " + path);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Wireless-powered relay throughput: closed forms and Monte Carlo", "ehrelay"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    // analytic
    CommonOptions c_an;
    std::string an_protocol = "all";
    auto* an = app.add_subcommand("analytic", "Evaluate the closed-form throughput expressions");
    add_common(an, c_an);
    an->add_option("--protocol", an_protocol, "af_cont, af_disc, df_cont, df_disc or all")
        ->capture_default_str();

    // simulate
    CommonOptions c_sim;
    std::string sim_protocol = "df_disc";
    std::uint64_t sim_blocks = 100000;
    double sim_alpha = 0.5;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo simulation of one protocol");
    add_common(sim, c_sim);
    sim->add_option("--protocol", sim_protocol, "Protocol to simulate")
        ->capture_default_str()
        ->check(CLI::IsMember(kProtocolNames));
    sim->add_option("--n-blocks", sim_blocks, "Number of blocks")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sim->add_option("--alpha", sim_alpha, "Harvesting fraction for the baseline")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));

    // validate
    CommonOptions c_val;
    std::string val_protocol = "all";
    std::uint64_t val_blocks = 100000;
    auto* val = app.add_subcommand("validate", "Compare simulated and analytic throughput");
    add_common(val, c_val);
    val->add_option("--protocol", val_protocol, "Protocol list or all")->capture_default_str();
    val->add_option("--n-blocks", val_blocks, "Blocks per protocol")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    // sweep
    CommonOptions c_sw;
    std::string sw_axis = "pr_dbm";
    std::string sw_grid;
    std::string sw_range;
    std::string sw_protocol = "all";
    std::string sw_mode = "both";
    std::string sw_out;
    std::uint64_t sw_blocks = 100000;
    bool sw_opt = false;
    auto* sw = app.add_subcommand("sweep", "Sweep one parameter and write a CSV table");
    add_common(sw, c_sw);
    sw->add_option("--axis", sw_axis, "pr_dbm, sigma_nr_dbm, sigma_nd_dbm or gamma_o_db")
        ->capture_default_str()
        ->check(CLI::IsMember({"pr_dbm", "sigma_nr_dbm", "sigma_nd_dbm", "gamma_o_db"}));
    auto* grid_opt = sw->add_option("--grid", sw_grid, "Comma-separated axis values");
    auto* range_opt = sw->add_option("--range", sw_range, "lo:hi:step for the axis");
    grid_opt->excludes(range_opt);
    sw->add_option("--protocol", sw_protocol, "Protocol list or all")->capture_default_str();
    sw->add_option("--mode", sw_mode, "analytic, simulate or both")
        ->capture_default_str()
        ->check(CLI::IsMember({"analytic", "simulate", "both"}));
    sw->add_option("--n-blocks", sw_blocks, "Blocks per simulated point")->capture_default_str();
    sw->add_flag("--optimal-pr", sw_opt, "Optimize the relay power at every point");
    sw->add_option("--out", sw_out, "CSV output path (stdout when omitted)");

    // optimize
    CommonOptions c_opt;
    std::string opt_protocol = "af_disc";
    std::string opt_mode = "analytic";
    std::string opt_range = "-40:40";
    std::uint64_t opt_blocks = 100000;
    auto* opt = app.add_subcommand("optimize", "Find the throughput-optimal relay power");
    add_common(opt, c_opt);
    opt->add_option("--protocol", opt_protocol, "Protocol; baseline optimizes its alpha")
        ->capture_default_str()
        ->check(CLI::IsMember(kProtocolNames));
    opt->add_option("--mode", opt_mode, "analytic or simulate")
        ->capture_default_str()
        ->check(CLI::IsMember({"analytic", "simulate"}));
    opt->add_option("--range", opt_range, "Relay power search range lo:hi [dBm]")
        ->capture_default_str();
    opt->add_option("--n-blocks", opt_blocks, "Blocks per simulated candidate")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    // figures
    CommonOptions c_fig;
    std::string fig_id = "fig1";
    std::string fig_out;
    std::uint64_t fig_blocks = 100000;
    auto* fig = app.add_subcommand("figures", "Write the dataset behind one figure as CSV");
    add_common(fig, c_fig);
    fig->add_option("--fig", fig_id, "fig1, fig2, fig3, fig4 or fig6")
        ->capture_default_str()
        ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4", "fig6"}));
    fig->add_option("--out", fig_out, "CSV output path (stdout when omitted)");
    fig->add_option("--n-blocks", fig_blocks, "Blocks per simulated point")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (an->parsed()) {
            const Resolved r = resolve(c_an);
            const TheoremInputs in = make_inputs(r.params, c_an.truncation_n, c_an.quad_tol);
            json j;
            j["params"] = params_json(r.params);
            json results = json::object();
            for (ProtocolId id : parse_protocol_list(an_protocol)) {
                const auto tau = analytic_throughput(id, in);
                if (!tau) throw UsageError("the baseline has no closed form; use simulate");
                results[protocol_name(id)] = {{"tau", *tau},
                                              {"kind", is_df(id) ? "lower_bound" : "exact"}};
            }
            if (results.size() == 1) {
                j["protocol"] = results.begin().key();
                j["tau"] = results.begin().value()["tau"];
            } else {
                j["results"] = results;
            }
            out << j.dump(2) << '\n';
            return 0;
        }

        if (sim->parsed()) {
            const Resolved r = resolve(c_sim);
            const ProtocolId id = parse_protocol(sim_protocol);
            SimOptions so;
            so.baseline_alpha = sim_alpha;
            if (id == ProtocolId::BASELINE_FIXED && !(sim_alpha > 0.0 && sim_alpha < 1.0)) {
                throw UsageError("--alpha must lie strictly between 0 and 1");
            }
            const SimResult res = run_parallel(r.params, id, sim_blocks, r.seed, c_sim.workers, so);
            json j = sim_json(res);
            j["protocol"] = protocol_name(id);
            j["seed"] = r.seed;
            j["workers"] = c_sim.workers;
            j["params"] = params_json(r.params);
            out << j.dump(2) << '\n';
            return 0;
        }

        if (val->parsed()) {
            const Resolved r = resolve(c_val);
            const TheoremInputs in = make_inputs(r.params, c_val.truncation_n, c_val.quad_tol);
            json rows = json::array();
            bool all_pass = true;
            for (ProtocolId id : parse_protocol_list(val_protocol)) {
                const auto tau = analytic_throughput(id, in);
                if (!tau) throw UsageError("the baseline has no closed form to validate against");
                const SimResult s = run_parallel(r.params, id, val_blocks, r.seed, c_val.workers);
                bool pass;
                std::string rule;
                if (is_df(id)) {
                    pass = *tau <= s.mean_tau + 3.0 * s.std_error;
                    rule = "analytic <= simulated + 3 stderr";
                } else {
                    pass = std::abs(s.mean_tau - *tau) <= 4.0 * s.std_error;
                    rule = "|simulated - analytic| <= 4 stderr";
                }
                all_pass = all_pass && pass;
                rows.push_back({{"protocol", protocol_name(id)},
                                {"analytic", *tau},
                                {"simulated", s.mean_tau},
                                {"std_error", s.std_error},
                                {"rule", rule},
                                {"pass", pass}});
            }
            json j = {{"params", params_json(r.params)},
                      {"n_blocks", val_blocks},
                      {"seed", r.seed},
                      {"rows", rows},
                      {"pass", all_pass}};
            out << j.dump(2) << '\n';
            return all_pass ? 0 : 1;
        }

        if (sw->parsed()) {
            const Resolved r = resolve(c_sw);
            SweepSpec spec;
            spec.axis = parse_axis(sw_axis);
            if (!sw_grid.empty()) {
                spec.grid = parse_number_list(sw_grid, ',');
            } else if (!sw_range.empty()) {
                const auto v = parse_number_list(sw_range, ':');
                if (v.size() != 3) throw UsageError("--range expects lo:hi:step");
                try {
                    spec.grid = make_grid(v[0], v[1], v[2]);
                } catch (const std::invalid_argument& e) {
                    throw UsageError(e.what());
                }
            } else {
                throw UsageError("sweep needs --grid or --range");
            }
            spec.protocols = parse_protocol_list(sw_protocol);
            spec.mode = parse_mode(sw_mode);
            spec.n_blocks = sw_blocks;
            spec.seed = r.seed;
            spec.workers = c_sw.workers;
            spec.optimize_relay_power = sw_opt;
            spec.numerics = {c_sw.truncation_n, c_sw.quad_tol};
            emit_csv(sw_out, out, spec.axis, sweep(spec, r.params));
            return 0;
        }

        if (opt->parsed()) {
            const Resolved r = resolve(c_opt);
            const ProtocolId id = parse_protocol(opt_protocol);
            json j;
            j["protocol"] = protocol_name(id);
            if (id == ProtocolId::BASELINE_FIXED) {
                const AlphaOptimum a =
                    optimize_baseline_alpha(r.params, default_alpha_grid(), opt_blocks, r.seed);
                j["alpha_opt"] = a.alpha_opt;
                j["tau_opt"] = a.tau_opt;
                j["std_error"] = a.std_error;
            } else {
                const auto v = parse_number_list(opt_range, ':');
                if (v.size() != 2 || !(v[1] >= v[0])) throw UsageError("--range expects lo:hi");
                OptimizeOptions oo;
                oo.range = {v[0], v[1]};
                oo.mode = parse_mode(opt_mode);
                oo.n_blocks = opt_blocks;
                oo.seed = r.seed;
                oo.numerics = {c_opt.truncation_n, c_opt.quad_tol};
                const PrOptimum best = optimize_pr(r.params, id, oo);
                j["mode"] = opt_mode;
                j["pr_opt_dbm"] = best.pr_opt_dbm;
                j["tau_opt"] = best.tau_opt;
                if (oo.mode == EvalMode::SIMULATE) j["std_error"] = best.std_error;
                j["fallback_scan"] = best.fallback_scan;
            }
            j["params"] = params_json(r.params);
            out << j.dump(2) << '\n';
            return 0;
        }

        if (fig->parsed()) {
            const Resolved r = resolve(c_fig);
            const FigureId id = parse_figure(fig_id);
            const SweepSpec spec = figure_spec(id, fig_blocks, r.seed, c_fig.workers);
            emit_csv(fig_out, out, spec.axis, sweep(spec, r.params));
            return 0;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace ehrelay
