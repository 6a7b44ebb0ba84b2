#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "ehrelay/analytic.hpp"
#include "ehrelay/params.hpp"
#include "ehrelay/sim.hpp"
#include "ehrelay/study.hpp"

using namespace ehrelay;

TEST_CASE("inclusive grids") {
    const auto g = make_grid(-20.0, 40.0, 1.0);
    CHECK(g.size() == 61);
    CHECK(g.front() == -20.0);
    CHECK(g.back() == 40.0);
    CHECK(make_grid(0.05, 0.95, 0.05).size() == 19);
    CHECK(make_grid(3.0, 3.0, 1.0).size() == 1);
    CHECK_THROWS(make_grid(0.0, 1.0, 0.0));
    CHECK_THROWS(make_grid(1.0, 0.0, 0.5));
    CHECK(default_alpha_grid().size() == 19);
}

TEST_CASE("scalar maximization") {
    SUBCASE("smooth unimodal objective") {
        const auto r = maximize_scalar([](double x) { return -(x - 3.217) * (x - 3.217); }, -40, 40);
        CHECK(std::abs(r.pr_opt_dbm - 3.217) <= 0.01);
        CHECK_FALSE(r.fallback_scan);
        CHECK(r.evaluations > 81);
    }
    SUBCASE("flat objective resolves to the lowest argument") {
        const auto r = maximize_scalar([](double) { return 1.0; }, -40, 40);
        CHECK(r.pr_opt_dbm == -40.0);
        CHECK(r.tau_opt == 1.0);
    }
    SUBCASE("maximum at the range edge") {
        const auto r = maximize_scalar([](double x) { return x; }, -10, 10);
        CHECK(r.pr_opt_dbm == doctest::Approx(10.0).epsilon(1e-12));
    }
    SUBCASE("several local maxima trigger the fallback scan") {
        auto f = [](double x) {
            return std::exp(-(x + 20.3) * (x + 20.3)) + 1.2 * std::exp(-(x - 15.62) * (x - 15.62));
        };
        const auto r = maximize_scalar(f, -40, 40);
        CHECK(r.fallback_scan);
        CHECK(std::abs(r.pr_opt_dbm - 15.62) <= 0.01);
    }
}

TEST_CASE("analytic relay-power optimum is reproducible and interior") {
    const SystemParams base = default_params();
    const auto a = optimize_pr(base, ProtocolId::AF_DISC);
    const auto b = optimize_pr(base, ProtocolId::AF_DISC);
    CHECK(a.pr_opt_dbm == b.pr_opt_dbm);
    CHECK(a.tau_opt == b.tau_opt);
    CHECK(a.pr_opt_dbm > -40.0);
    CHECK(a.pr_opt_dbm < 40.0);
    // Optimum beats its neighbours 0.05 dB away.
    for (double step : {-0.05, 0.05}) {
        const double tau = throughput_af_discrete(
            make_inputs(with_axis_value(base, SweepAxis::PR_DBM, a.pr_opt_dbm + step)));
        CHECK(tau <= a.tau_opt * (1.0 + 1e-12));
    }
    CHECK_THROWS_AS(optimize_pr(base, ProtocolId::BASELINE_FIXED), std::invalid_argument);
}

TEST_CASE("simulated and analytic optima of continuous AF are within 1 dB") {
    const SystemParams base = default_params();
    const auto exact = optimize_pr(base, ProtocolId::AF_CONT);
    OptimizeOptions opt;
    opt.mode = EvalMode::SIMULATE;
    opt.range = {exact.pr_opt_dbm - 6.0, exact.pr_opt_dbm + 6.0};
    opt.n_blocks = 200000;
    opt.seed = 12;
    const auto sim = optimize_pr(base, ProtocolId::AF_CONT, opt);
    CHECK(std::abs(sim.pr_opt_dbm - exact.pr_opt_dbm) <= 1.0);
    CHECK(sim.std_error > 0.0);
    // Common random numbers make the simulated optimum reproducible.
    CHECK(optimize_pr(base, ProtocolId::AF_CONT, opt).pr_opt_dbm == sim.pr_opt_dbm);
}

TEST_CASE("single-point sweep equals direct evaluation") {
    const SystemParams base = default_params();
    SweepSpec spec;
    spec.axis = SweepAxis::PR_DBM;
    spec.grid = {7.0};
    spec.protocols = {ProtocolId::AF_CONT, ProtocolId::DF_DISC};
    spec.mode = EvalMode::BOTH;
    spec.n_blocks = 20000;
    spec.seed = 4;
    const auto rows = sweep(spec, base);
    REQUIRE(rows.size() == 2);
    const SystemParams p = with_axis_value(base, SweepAxis::PR_DBM, 7.0);
    CHECK(*rows[0].analytic_tau == throughput_af_continuous(make_inputs(p)));
    CHECK(*rows[1].analytic_tau == throughput_df_discrete_lb(make_inputs(p)));
    const SimResult r = run(p, ProtocolId::DF_DISC, 20000, 4);
    CHECK(*rows[1].sim_tau == r.mean_tau);
    CHECK(*rows[1].sim_stderr == r.std_error);
    CHECK(rows[1].pr_dbm == 7.0);
}

TEST_CASE("sweep rows do not depend on the worker count") {
    SweepSpec spec;
    spec.axis = SweepAxis::GAMMA_O_DB;
    spec.grid = make_grid(20.0, 60.0, 10.0);
    spec.protocols = {ProtocolId::AF_DISC, ProtocolId::DF_CONT};
    spec.mode = EvalMode::BOTH;
    spec.n_blocks = 5000;
    const auto serial = sweep(spec, default_params());
    spec.workers = 4;
    const auto threaded = sweep(spec, default_params());
    REQUIRE(serial.size() == threaded.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].axis_value == threaded[i].axis_value);
        CHECK(serial[i].protocol == threaded[i].protocol);
        CHECK(*serial[i].analytic_tau == *threaded[i].analytic_tau);
        CHECK(*serial[i].sim_tau == *threaded[i].sim_tau);
    }
}

TEST_CASE("sweep specification validation") {
    SweepSpec spec;
    spec.protocols = {ProtocolId::AF_CONT};
    CHECK_THROWS_AS(spec.validate(), ParamError);  // empty grid
    spec.grid = {0.0};
    CHECK_NOTHROW(spec.validate());
    spec.n_blocks = 0;
    CHECK_THROWS_AS(spec.validate(), ParamError);
    spec.n_blocks = 10;
    spec.pr_range = {10.0, -10.0};
    CHECK_THROWS_AS(spec.validate(), ParamError);
    spec.pr_range = {};
    spec.baseline_alpha = 1.5;
    CHECK_THROWS_AS(spec.validate(), ParamError);
    spec.baseline_alpha = 0.5;
    spec.protocols.clear();
    CHECK_THROWS_AS(spec.validate(), ParamError);
}

TEST_CASE("baseline harvesting fraction optimum") {
    const SystemParams base = default_params();
    const auto a = optimize_baseline_alpha(base, default_alpha_grid(), 20000, 5);
    const auto b = optimize_baseline_alpha(base, default_alpha_grid(), 20000, 5);
    CHECK(a.alpha_opt == b.alpha_opt);
    CHECK(a.alpha_opt > 0.0);
    CHECK(a.alpha_opt < 1.0);
    CHECK(a.tau_opt <= 0.5 * (1.0 - a.alpha_opt) + 1e-15);
    const auto single = optimize_baseline_alpha(base, {0.4}, 20000, 5);
    CHECK(single.alpha_opt == 0.4);
    CHECK_THROWS(optimize_baseline_alpha(base, {0.0, 0.5}, 100, 1));
    CHECK_THROWS(optimize_baseline_alpha(base, {}, 100, 1));
}

TEST_CASE("optimized sweep rows use the per-point optimum") {
    SweepSpec spec = figure_spec(FigureId::FIG3, 5000, 2, 1);
    spec.grid = {-70.0};
    const auto rows = sweep(spec, default_params());
    REQUIRE(rows.size() == 4);
    const SystemParams p = with_axis_value(default_params(), SweepAxis::SIGMA_NR_DBM, -70.0);
    const auto af = optimize_pr(p, ProtocolId::AF_CONT);
    CHECK(rows[0].protocol == ProtocolId::AF_CONT);
    CHECK(rows[0].pr_dbm == af.pr_opt_dbm);
    CHECK(*rows[0].analytic_tau == af.tau_opt);
}

TEST_CASE("adaptive AF beats the fixed-split baseline at demanding thresholds") {
    SweepSpec spec = figure_spec(FigureId::FIG6, 20000, 3, 1);
    spec.grid = {40.0, 60.0};
    spec.protocols = {ProtocolId::AF_DISC, ProtocolId::BASELINE_FIXED};
    spec.mode = EvalMode::SIMULATE;
    const auto rows = sweep(spec, default_params());
    REQUIRE(rows.size() == 4);
    for (int i = 0; i < 2; ++i) {
        const auto& adaptive = rows[2 * i];
        const auto& fixed = rows[2 * i + 1];
        CHECK(adaptive.protocol == ProtocolId::AF_DISC);
        CHECK(fixed.protocol == ProtocolId::BASELINE_FIXED);
        CHECK(*adaptive.sim_tau > *fixed.sim_tau);
    }
}

TEST_CASE("simulated AF rows track the exact values") {
    SweepSpec spec;
    spec.axis = SweepAxis::PR_DBM;
    spec.grid = {-10.0, 0.0, 10.0};
    spec.protocols = {ProtocolId::AF_CONT, ProtocolId::AF_DISC};
    spec.mode = EvalMode::BOTH;
    spec.n_blocks = 100000;
    for (const auto& row : sweep(spec, default_params())) {
        CAPTURE(row.axis_value);
        CHECK(std::abs(*row.sim_tau - *row.analytic_tau) <= 4.0 * *row.sim_stderr);
    }
}

TEST_CASE("figure specifications") {
    const auto f1 = figure_spec(FigureId::FIG1, 100, 1, 1);
    CHECK(f1.axis == SweepAxis::PR_DBM);
    CHECK(f1.grid.size() == 61);
    CHECK(f1.protocols.size() == 2);
    CHECK_FALSE(f1.optimize_relay_power);
    const auto f6 = figure_spec(FigureId::FIG6, 100, 1, 1);
    CHECK(f6.axis == SweepAxis::GAMMA_O_DB);
    CHECK(f6.protocols.size() == 5);
    CHECK(f6.optimize_relay_power);
    for (FigureId id : {FigureId::FIG1, FigureId::FIG2, FigureId::FIG3, FigureId::FIG4,
                        FigureId::FIG6}) {
        CHECK(parse_figure(figure_name(id)) == id);
    }
    CHECK_THROWS(parse_figure("fig5"));
    CHECK(parse_axis("sigma_nd_dbm") == SweepAxis::SIGMA_ND_DBM);
    CHECK(parse_mode("both") == EvalMode::BOTH);
    CHECK_THROWS(parse_axis("eta"));
}

TEST_CASE("CSV layout") {
    std::vector<SweepRow> rows(2);
    rows[0].axis_value = 1.5;
    rows[0].protocol = ProtocolId::AF_CONT;
    rows[0].analytic_tau = 0.25;
    rows[0].sim_tau = 0.125;
    rows[0].sim_stderr = 0.001;
    rows[1].axis_value = 2.0;
    rows[1].protocol = ProtocolId::DF_DISC;
    rows[1].analytic_tau = 0.1;
    std::ostringstream os;
    write_csv(os, SweepAxis::GAMMA_O_DB, rows);
    CHECK(os.str() ==
          "gamma_o_db,protocol,mode,tau,stderr\n"
          "1.5,af_cont,analytic,0.25,\n"
          "1.5,af_cont,simulate,0.125,0.001\n"
          "2,df_disc,analytic,0.1,\n");
}
