#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ehrelay/params.hpp"
#include "ehrelay/protocols.hpp"

namespace ehrelay {

enum class SweepAxis { PR_DBM, SIGMA_NR_DBM, SIGMA_ND_DBM, GAMMA_O_DB };
enum class EvalMode { ANALYTIC, SIMULATE, BOTH };

std::string axis_name(SweepAxis axis);  // pr_dbm, sigma_nr_dbm, sigma_nd_dbm, gamma_o_db
SweepAxis parse_axis(const std::string& name);
std::string mode_name(EvalMode mode);   // analytic, simulate, both
EvalMode parse_mode(const std::string& name);

/// Returns a copy of base with one axis set to a dB/dBm value.
SystemParams with_axis_value(const SystemParams& base, SweepAxis axis, double value);

/// Relay-power search range in dBm.
struct PrRange {
    double lo_dbm = -40.0;
    double hi_dbm = 40.0;
};

struct NumericSettings {
    int truncation_n = 10;
    double quad_tol = 1e-9;
};

struct SweepSpec {
    SweepAxis axis = SweepAxis::PR_DBM;
    std::vector<double> grid;
    std::vector<ProtocolId> protocols;
    EvalMode mode = EvalMode::BOTH;
    std::uint64_t n_blocks = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 1;  // sweep points evaluated concurrently

    /// When set, each (point, protocol) first has its relay power optimized
    /// analytically over pr_range and is evaluated there. The baseline
    /// instead has its harvesting fraction optimized by simulation.
    bool optimize_relay_power = false;
    PrRange pr_range;
    std::vector<double> baseline_alpha_grid;  // empty: 0.05, 0.10, ..., 0.95
    double baseline_alpha = 0.5;              // used when not optimizing
    NumericSettings numerics;

    /// Throws ParamError naming the violated invariant.
    void validate() const;
};

struct SweepRow {
    double axis_value = 0.0;
    ProtocolId protocol = ProtocolId::AF_CONT;
    double pr_dbm = 0.0;   // relay power (or baseline alpha) actually used
    std::optional<double> analytic_tau;
    std::optional<double> sim_tau;
    std::optional<double> sim_stderr;
};

/// One row per grid point and protocol, in grid-major order. Simulations use
/// spec.seed at every point, so rows are reproducible regardless of
/// spec.workers.
std::vector<SweepRow> sweep(const SweepSpec& spec, const SystemParams& base);

struct PrOptimum {
    double pr_opt_dbm = 0.0;
    double tau_opt = 0.0;
    double std_error = 0.0;     // simulate mode only
    bool fallback_scan = false; // coarse grid showed several local maxima
    int evaluations = 0;
};

struct OptimizeOptions {
    PrRange range;
    EvalMode mode = EvalMode::ANALYTIC;  // BOTH is treated as ANALYTIC
    std::uint64_t n_blocks = 100000;
    std::uint64_t seed = 1;
    NumericSettings numerics;
};

/// Maximizes a scalar objective over [lo, hi]: 1 dB coarse grid, then a
/// golden-section refinement to 0.01 dB around the best grid point. When the
/// grid has more than one local maximum, a 0.01 dB scan around each of them
/// replaces the golden section. Ties go to the lowest argument.
PrOptimum maximize_scalar(const std::function<double(double)>& objective, double lo, double hi);

/// Best preset relay power for a protocol. Simulated objectives reuse one
/// seed for every candidate (common random numbers).
PrOptimum optimize_pr(const SystemParams& base, ProtocolId id, const OptimizeOptions& opt = {});

struct AlphaOptimum {
    double alpha_opt = 0.0;
    double tau_opt = 0.0;
    double std_error = 0.0;
};

/// Best fixed harvesting fraction for the baseline, by simulation with a
/// common seed. Ties go to the lowest alpha. Every grid value must lie in (0, 1).
AlphaOptimum optimize_baseline_alpha(const SystemParams& base, const std::vector<double>& grid,
                                     std::uint64_t n_blocks, std::uint64_t seed);

std::vector<double> default_alpha_grid();

/// Inclusive arithmetic grid lo, lo + step, ..., hi.
std::vector<double> make_grid(double lo, double hi, double step);

enum class FigureId { FIG1, FIG2, FIG3, FIG4, FIG6 };
std::string figure_name(FigureId id);
FigureId parse_figure(const std::string& name);

/// Sweep specification behind each figure dataset.
SweepSpec figure_spec(FigureId id, std::uint64_t n_blocks, std::uint64_t seed, unsigned workers);

/// Runs figure_spec and returns the table.
std::vector<SweepRow> figure_bundle(FigureId id, const SystemParams& base, std::uint64_t n_blocks,
                                    std::uint64_t seed, unsigned workers = 1);

/// CSV with header "<axis>,protocol,mode,tau,stderr". Each row expands into
/// an analytic line and/or a simulate line; stderr is empty for analytic.
void write_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows);

}  // namespace ehrelay
