#pragma once

#include <string>
#include <utility>

#include "ehrelay/channel.hpp"
#include "ehrelay/params.hpp"

namespace ehrelay {

enum class ProtocolId { AF_CONT, AF_DISC, DF_CONT, DF_DISC, BASELINE_FIXED };

/// Short lowercase names used on the command line and in CSV output:
/// af_cont, af_disc, df_cont, df_disc, baseline.
std::string protocol_name(ProtocolId id);

/// Inverse of protocol_name. Throws std::invalid_argument for unknown names.
ProtocolId parse_protocol(const std::string& name);

bool is_df(ProtocolId id);

struct RelayState {
    double battery = 0.0;  // energy stored at the block boundary
    ProtocolId protocol_id = ProtocolId::AF_CONT;
};

struct BlockOutcome {
    double alpha = 0.0;        // fraction of the block spent harvesting
    bool outage = false;       // no information reached the destination
    double tau = 0.0;          // (1 - outage) (1 - alpha) / 2
    double energy_in = 0.0;    // battery at the start of the block
    double energy_out = 0.0;   // battery at the end of the block
    bool relay_outage = false; // DF only: |h|^2 below the decoding threshold
    double harvested = 0.0;
    double consumed = 0.0;
};

struct StepResult {
    BlockOutcome outcome;
    RelayState state;
};

/// End-to-end SNR of a two-hop amplify-and-forward link with the preset relay power.
double af_snr(const SystemParams& p, const ChannelBlock& blk);

/// Same, with an explicit relay transmit power (used by the fixed-alpha baseline).
double af_snr(const SystemParams& p, const ChannelBlock& blk, double relay_power);

/// Decode-and-forward SNRs at the relay and at the destination.
std::pair<double, double> df_snrs(const SystemParams& p, const ChannelBlock& blk);

/// Protocol 1: harvest exactly enough in every block, nothing is carried over.
BlockOutcome step_af_continuous(const SystemParams& p, const DerivedConstants& dc,
                                const ChannelBlock& blk, const RelayState& state);

StepResult step_af_discrete(const SystemParams& p, const DerivedConstants& dc,
                            const ChannelBlock& blk, const RelayState& state);

StepResult step_df_continuous(const SystemParams& p, const DerivedConstants& dc,
                              const ChannelBlock& blk, const RelayState& state);

StepResult step_df_discrete(const SystemParams& p, const DerivedConstants& dc,
                            const ChannelBlock& blk, const RelayState& state);

/// Fixed harvesting fraction; the relay transmits with whatever power that
/// fraction of the block yields. fixed_alpha must lie in (0, 1).
BlockOutcome step_baseline_fixed(const SystemParams& p, const ChannelBlock& blk,
                                 double fixed_alpha);

/// Same, reusing the cached path-loss factors in dc.
BlockOutcome step_baseline_fixed(const SystemParams& p, const DerivedConstants& dc,
                                 const ChannelBlock& blk, double fixed_alpha);

/// Dispatches on state.protocol_id. baseline_alpha is only read for
/// BASELINE_FIXED.
StepResult step(const SystemParams& p, const DerivedConstants& dc, const ChannelBlock& blk,
                const RelayState& state, double baseline_alpha = 0.5);

}  // namespace ehrelay
