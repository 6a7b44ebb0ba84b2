#pragma once

#include <cstdint>
#include <vector>

#include "ehrelay/params.hpp"
#include "ehrelay/protocols.hpp"

namespace ehrelay {

/// Running mean and variance (Welford), mergeable across workers.
struct RunningStats {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x);
    void merge(const RunningStats& other);
    double variance() const;  // unbiased; 0 with fewer than two samples
    double std_error() const;
};

/// Compensated (Neumaier) sum for the energy ledger.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x);
    double value() const { return sum + comp; }
};

struct SimTallies {
    std::uint64_t it_blocks = 0;            // blocks with alpha < 1
    std::uint64_t relay_outage_blocks = 0;  // DF: |h|^2 below threshold
    std::uint64_t dest_outage_blocks = 0;   // IT blocks that failed at the destination

    double it_block_fraction = 0.0;
    double relay_outage_rate = 0.0;
    double dest_outage_rate = 0.0;  // among IT blocks

    // Per EH-IT pattern. The first pattern starts from an empty battery
    // rather than the steady state, so it is left out of these tallies.
    RunningStats x_stats;  // EH blocks spent reaching the IT energy
    RunningStats y_stats;  // further EH blocks forced by relay outage
    double mean_X = 0.0;
    double mean_Y = 0.0;
    std::vector<std::uint64_t> y_histogram;  // last bin collects the overflow
    std::vector<double> eo_samples;          // battery at each pattern start
};

struct SimResult {
    double mean_tau = 0.0;
    double std_error = 0.0;
    std::uint64_t n_blocks = 0;
    SimTallies tallies;

    RunningStats tau_stats;
    double total_harvested = 0.0;
    double total_consumed = 0.0;
    double initial_battery = 0.0;
    double final_battery = 0.0;
    double min_battery = 0.0;
    double max_tau = 0.0;
};

struct SimOptions {
    double baseline_alpha = 0.5;              // read only by BASELINE_FIXED
    std::size_t max_eo_samples = 1u << 20;    // cap on stored pattern-start energies
    std::size_t y_histogram_bins = 32;
};

/// Simulates n_blocks consecutive blocks of one protocol, starting from an
/// empty battery. Throws std::invalid_argument when n_blocks is zero.
SimResult run(const SystemParams& p, ProtocolId id, std::uint64_t n_blocks, std::uint64_t seed,
              const SimOptions& opt = {});

/// Splits n_blocks over `workers` threads, each on its own jumped substream
/// and with its own cold-started battery; the last worker also takes the
/// remainder. workers = 1 reproduces run() exactly.
SimResult run_parallel(const SystemParams& p, ProtocolId id, std::uint64_t n_blocks,
                       std::uint64_t seed, unsigned workers, const SimOptions& opt = {});

}  // namespace ehrelay
