#include "ehrelay/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <stdexcept>
#include <thread>

#include "ehrelay/analytic.hpp"
#include "ehrelay/sim.hpp"

namespace ehrelay {

std::string axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::PR_DBM: return "pr_dbm";
        case SweepAxis::SIGMA_NR_DBM: return "sigma_nr_dbm";
        case SweepAxis::SIGMA_ND_DBM: return "sigma_nd_dbm";
        case SweepAxis::GAMMA_O_DB: return "gamma_o_db";
    }
    return "unknown";
}

SweepAxis parse_axis(const std::string& name) {
    if (name == "pr_dbm") return SweepAxis::PR_DBM;
    if (name == "sigma_nr_dbm") return SweepAxis::SIGMA_NR_DBM;
    if (name == "sigma_nd_dbm") return SweepAxis::SIGMA_ND_DBM;
    if (name == "gamma_o_db") return SweepAxis::GAMMA_O_DB;
    throw std::invalid_argument("unknown sweep axis: " + name);
}

std::string mode_name(EvalMode mode) {
    switch (mode) {
        case EvalMode::ANALYTIC: return "analytic";
        case EvalMode::SIMULATE: return "simulate";
        case EvalMode::BOTH: return "both";
    }
    return "unknown";
}

EvalMode parse_mode(const std::string& name) {
    if (name == "analytic") return EvalMode::ANALYTIC;
    if (name == "simulate") return EvalMode::SIMULATE;
    if (name == "both") return EvalMode::BOTH;
    throw std::invalid_argument("unknown mode: " + name);
}

SystemParams with_axis_value(const SystemParams& base, SweepAxis axis, double value) {
    SystemParams p = base;
    switch (axis) {
        case SweepAxis::PR_DBM: p.relay_power = dbm_to_watts(value); break;
        case SweepAxis::SIGMA_NR_DBM: p.noise_relay = dbm_to_watts(value); break;
        case SweepAxis::SIGMA_ND_DBM: p.noise_dest = dbm_to_watts(value); break;
        case SweepAxis::GAMMA_O_DB: p.snr_threshold = db_to_linear(value); break;
    }
    p.validate();
    return p;
}

std::vector<double> make_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw std::invalid_argument("grid needs finite lo <= hi and step > 0");
    }
    std::vector<double> g;
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= count; ++i) g.push_back(lo + static_cast<double>(i) * step);
    if (hi - g.back() > 1e-9 * std::max(1.0, std::abs(hi))) g.push_back(hi);
    return g;
}

std::vector<double> default_alpha_grid() { return make_grid(0.05, 0.95, 0.05); }

void SweepSpec::validate() const {
    if (grid.empty()) throw ParamError("invariant violated: sweep grid is non-empty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw ParamError("invariant violated: sweep grid is strictly increasing");
        }
    }
    if (protocols.empty()) throw ParamError("invariant violated: at least one protocol");
    if (mode != EvalMode::ANALYTIC && n_blocks < 1000) {
        throw ParamError("invariant violated: n_blocks >= 1000 when simulating");
    }
    if (workers < 1) throw ParamError("invariant violated: workers >= 1");
    if (!(pr_range.hi_dbm >= pr_range.lo_dbm)) {
        throw ParamError("invariant violated: relay power range lo <= hi");
    }
}

namespace {

constexpr double kCoarseStep = 1.0;
constexpr double kFineStep = 0.01;

// Golden-section search for a maximum on [a, b] down to width tol.
double golden_max(const std::function<double(double)>& f, double a, double b, double tol,
                  int& evals) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    evals += 2;
    while (b - a > tol) {
        if (f1 >= f2) {  // keep the lower side on ties
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        ++evals;
    }
    return 0.5 * (a + b);
}

}  // namespace

PrOptimum maximize_scalar(const std::function<double(double)>& objective, double lo, double hi) {
    if (!(hi >= lo)) throw std::invalid_argument("search range needs lo <= hi");
    PrOptimum best;
    const std::vector<double> grid = make_grid(lo, hi, kCoarseStep);
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = objective(grid[i]);
    best.evaluations = static_cast<int>(grid.size());

    std::size_t ib = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (vals[i] > vals[ib]) ib = i;
    }
    best.pr_opt_dbm = grid[ib];
    best.tau_opt = vals[ib];

    std::vector<std::size_t> peaks;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const bool above_left = i == 0 || vals[i] > vals[i - 1];
        const bool above_right = i + 1 == grid.size() || vals[i] > vals[i + 1];
        if (above_left && above_right) peaks.push_back(i);
    }

    auto consider = [&best](double x, double v) {
        if (v > best.tau_opt || (v == best.tau_opt && x < best.pr_opt_dbm)) {
            best.pr_opt_dbm = x;
            best.tau_opt = v;
        }
    };

    if (grid.size() < 2) return best;
    if (peaks.size() > 1) {
        best.fallback_scan = true;
        for (std::size_t ip : peaks) {
            const double a = std::max(lo, grid[ip] - kCoarseStep);
            const double b = std::min(hi, grid[ip] + kCoarseStep);
            for (double x : make_grid(a, b, kFineStep)) {
                consider(x, objective(x));
                ++best.evaluations;
            }
        }
        return best;
    }

    const double a = ib == 0 ? grid[0] : grid[ib - 1];
    const double b = ib + 1 == grid.size() ? grid.back() : grid[ib + 1];
    int evals = 0;
    const double x = golden_max(objective, a, b, kFineStep, evals);
    const double v = objective(x);
    best.evaluations += evals + 1;
    if (v > best.tau_opt) {
        best.pr_opt_dbm = x;
        best.tau_opt = v;
    }
    return best;
}

PrOptimum optimize_pr(const SystemParams& base, ProtocolId id, const OptimizeOptions& opt) {
    if (id == ProtocolId::BASELINE_FIXED) {
        throw std::invalid_argument("the baseline has no preset relay power; optimize its alpha");
    }
    const bool simulate = opt.mode == EvalMode::SIMULATE;
    std::function<double(double)> objective;
    if (simulate) {
        objective = [&](double pr_dbm) {
            const SystemParams p = with_axis_value(base, SweepAxis::PR_DBM, pr_dbm);
            return run(p, id, opt.n_blocks, opt.seed).mean_tau;
        };
    } else {
        objective = [&](double pr_dbm) {
            const SystemParams p = with_axis_value(base, SweepAxis::PR_DBM, pr_dbm);
            const TheoremInputs in =
                make_inputs(p, opt.numerics.truncation_n, opt.numerics.quad_tol);
            return *analytic_throughput(id, in);
        };
    }
    PrOptimum best = maximize_scalar(objective, opt.range.lo_dbm, opt.range.hi_dbm);
    if (simulate) {
        const SystemParams p = with_axis_value(base, SweepAxis::PR_DBM, best.pr_opt_dbm);
        best.std_error = run(p, id, opt.n_blocks, opt.seed).std_error;
    }
    return best;
}

AlphaOptimum optimize_baseline_alpha(const SystemParams& base, const std::vector<double>& grid,
                                     std::uint64_t n_blocks, std::uint64_t seed) {
    if (grid.empty()) throw std::invalid_argument("baseline alpha grid is empty");
    AlphaOptimum best;
    bool first = true;
    SimOptions so;
    for (double alpha : grid) {
        if (!(alpha > 0.0 && alpha < 1.0)) {
            throw std::invalid_argument("baseline alpha grid values must lie in (0, 1)");
        }
        so.baseline_alpha = alpha;
        const SimResult r = run(base, ProtocolId::BASELINE_FIXED, n_blocks, seed, so);
        if (first || r.mean_tau > best.tau_opt ||
            (r.mean_tau == best.tau_opt && alpha < best.alpha_opt)) {
            best = {alpha, r.mean_tau, r.std_error};
            first = false;
        }
    }
    return best;
}

namespace {

SweepRow evaluate_point(const SweepSpec& spec, const SystemParams& base, double axis_value,
                        ProtocolId id) {
    SweepRow row;
    row.axis_value = axis_value;
    row.protocol = id;
    SystemParams p = with_axis_value(base, spec.axis, axis_value);
    const bool want_sim = spec.mode != EvalMode::ANALYTIC;
    const bool want_analytic = spec.mode != EvalMode::SIMULATE;

    if (id == ProtocolId::BASELINE_FIXED) {
        // No closed form: the baseline is always simulated.
        double alpha = spec.baseline_alpha;
        if (spec.optimize_relay_power) {
            const auto grid =
                spec.baseline_alpha_grid.empty() ? default_alpha_grid() : spec.baseline_alpha_grid;
            alpha = optimize_baseline_alpha(p, grid, spec.n_blocks, spec.seed).alpha_opt;
        }
        SimOptions so;
        so.baseline_alpha = alpha;
        const SimResult r = run(p, id, spec.n_blocks, spec.seed, so);
        row.pr_dbm = alpha;
        row.sim_tau = r.mean_tau;
        row.sim_stderr = r.std_error;
        return row;
    }

    if (spec.optimize_relay_power) {
        OptimizeOptions oo;
        oo.range = spec.pr_range;
        oo.mode = EvalMode::ANALYTIC;
        oo.numerics = spec.numerics;
        const PrOptimum best = optimize_pr(p, id, oo);
        p = with_axis_value(p, SweepAxis::PR_DBM, best.pr_opt_dbm);
    }
    row.pr_dbm = watts_to_dbm(p.relay_power);
    if (want_analytic) {
        const TheoremInputs in = make_inputs(p, spec.numerics.truncation_n, spec.numerics.quad_tol);
        row.analytic_tau = analytic_throughput(id, in);
    }
    if (want_sim) {
        const SimResult r = run(p, id, spec.n_blocks, spec.seed);
        row.sim_tau = r.mean_tau;
        row.sim_stderr = r.std_error;
    }
    return row;
}

}  // namespace

std::vector<SweepRow> sweep(const SweepSpec& spec, const SystemParams& base) {
    spec.validate();
    base.validate();
    const std::size_t n_proto = spec.protocols.size();
    const std::size_t n_tasks = spec.grid.size() * n_proto;
    std::vector<SweepRow> rows(n_tasks);
    std::vector<std::exception_ptr> errors(n_tasks);
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= n_tasks) return;
            try {
                rows[k] = evaluate_point(spec, base, spec.grid[k / n_proto],
                                         spec.protocols[k % n_proto]);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };

    const unsigned n_threads =
        static_cast<unsigned>(std::min<std::size_t>(spec.workers, n_tasks));
    if (n_threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

std::string figure_name(FigureId id) {
    switch (id) {
        case FigureId::FIG1: return "fig1";
        case FigureId::FIG2: return "fig2";
        case FigureId::FIG3: return "fig3";
        case FigureId::FIG4: return "fig4";
        case FigureId::FIG6: return "fig6";
    }
    return "unknown";
}

FigureId parse_figure(const std::string& name) {
    if (name == "fig1") return FigureId::FIG1;
    if (name == "fig2") return FigureId::FIG2;
    if (name == "fig3") return FigureId::FIG3;
    if (name == "fig4") return FigureId::FIG4;
    if (name == "fig6") return FigureId::FIG6;
    throw std::invalid_argument("unknown figure: " + name);
}

SweepSpec figure_spec(FigureId id, std::uint64_t n_blocks, std::uint64_t seed, unsigned workers) {
    SweepSpec s;
    s.mode = EvalMode::BOTH;
    s.n_blocks = n_blocks;
    s.seed = seed;
    s.workers = workers;
    const std::vector<ProtocolId> all4 = {ProtocolId::AF_CONT, ProtocolId::AF_DISC,
                                          ProtocolId::DF_CONT, ProtocolId::DF_DISC};
    switch (id) {
        case FigureId::FIG1:
            s.axis = SweepAxis::PR_DBM;
            s.grid = make_grid(-20.0, 40.0, 1.0);
            s.protocols = {ProtocolId::AF_CONT, ProtocolId::AF_DISC};
            break;
        case FigureId::FIG2:
            s.axis = SweepAxis::PR_DBM;
            s.grid = make_grid(-20.0, 40.0, 1.0);
            s.protocols = {ProtocolId::DF_CONT, ProtocolId::DF_DISC};
            break;
        case FigureId::FIG3:
            s.axis = SweepAxis::SIGMA_NR_DBM;
            s.grid = make_grid(-100.0, -40.0, 5.0);
            s.protocols = all4;
            s.optimize_relay_power = true;
            break;
        case FigureId::FIG4:
            s.axis = SweepAxis::SIGMA_ND_DBM;
            s.grid = make_grid(-120.0, -60.0, 5.0);
            s.protocols = all4;
            s.optimize_relay_power = true;
            break;
        case FigureId::FIG6:
            s.axis = SweepAxis::GAMMA_O_DB;
            s.grid = make_grid(10.0, 80.0, 5.0);
            s.protocols = all4;
            s.protocols.push_back(ProtocolId::BASELINE_FIXED);
            s.optimize_relay_power = true;
            break;
    }
    return s;
}

std::vector<SweepRow> figure_bundle(FigureId id, const SystemParams& base, std::uint64_t n_blocks,
                                    std::uint64_t seed, unsigned workers) {
    return sweep(figure_spec(id, n_blocks, seed, workers), base);
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

void write_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows) {
    out << axis_name(axis) << ",protocol,mode,tau,stderr\n";
    for (const auto& r : rows) {
        const std::string name = protocol_name(r.protocol);
        if (r.analytic_tau) {
            out << fmt(r.axis_value) << ',' << name << ",analytic," << fmt(*r.analytic_tau) << ",\n";
        }
        if (r.sim_tau) {
            out << fmt(r.axis_value) << ',' << name << ",simulate," << fmt(*r.sim_tau) << ','
                << fmt(r.sim_stderr.value_or(0.0)) << '\n';
        }
    }
}

}  // namespace ehrelay
