#include "ehrelay/protocols.hpp"

#include <stdexcept>

namespace ehrelay {

std::string protocol_name(ProtocolId id) {
    switch (id) {
        case ProtocolId::AF_CONT: return "af_cont";
        case ProtocolId::AF_DISC: return "af_disc";
        case ProtocolId::DF_CONT: return "df_cont";
        case ProtocolId::DF_DISC: return "df_disc";
        case ProtocolId::BASELINE_FIXED: return "baseline";
    }
    return "unknown";
}

ProtocolId parse_protocol(const std::string& name) {
    if (name == "af_cont") return ProtocolId::AF_CONT;
    if (name == "af_disc") return ProtocolId::AF_DISC;
    if (name == "df_cont") return ProtocolId::DF_CONT;
    if (name == "df_disc") return ProtocolId::DF_DISC;
    if (name == "baseline") return ProtocolId::BASELINE_FIXED;
    throw std::invalid_argument("unknown protocol: " + name);
}

bool is_df(ProtocolId id) { return id == ProtocolId::DF_CONT || id == ProtocolId::DF_DISC; }

double af_snr(const SystemParams& p, const ChannelBlock& blk) {
    return af_snr(p, blk, p.relay_power);
}

double af_snr(const SystemParams& p, const ChannelBlock& blk, double relay_power) {
    const double d1m = p.path_loss_sr();
    const double d2m = p.path_loss_rd();
    const double num = p.source_power * relay_power * blk.h2 * blk.g2;
    const double den = relay_power * blk.g2 * d1m * p.noise_relay +
                       d2m * p.noise_dest * (p.source_power * blk.h2 + d1m * p.noise_relay);
    return num / den;
}

std::pair<double, double> df_snrs(const SystemParams& p, const ChannelBlock& blk) {
    const double gr = p.source_power * blk.h2 / (p.path_loss_sr() * p.noise_relay);
    const double gd = p.relay_power * blk.g2 / (p.path_loss_rd() * p.noise_dest);
    return {gr, gd};
}

namespace {

double block_tau(bool outage, double alpha) { return outage ? 0.0 : 0.5 * (1.0 - alpha); }

// Energy collected over the fraction `alpha` of a block.
double harvest(const SystemParams& p, const DerivedConstants& dc, double h2, double alpha) {
    return p.conversion_efficiency * p.source_power * h2 * alpha * p.block_time / dc.d1m;
}

// Inline SNR forms reuse the cached path-loss factors; the public af_snr
// recomputes them, which is fine for one-off calls but not per block.
double af_snr_cached(const SystemParams& p, const DerivedConstants& dc, const ChannelBlock& blk,
                     double relay_power) {
    const double num = p.source_power * relay_power * blk.h2 * blk.g2;
    const double den = relay_power * blk.g2 * dc.d1m * p.noise_relay +
                       dc.d2m * p.noise_dest * (p.source_power * blk.h2 + dc.d1m * p.noise_relay);
    return num / den;
}

BlockOutcome eh_only(const SystemParams& p, const DerivedConstants& dc, const ChannelBlock& blk,
                     double battery) {
    BlockOutcome o;
    o.alpha = 1.0;
    o.outage = true;
    o.tau = 0.0;
    o.energy_in = battery;
    o.harvested = harvest(p, dc, blk.h2, 1.0);
    o.energy_out = battery + o.harvested;
    return o;
}

}  // namespace

BlockOutcome step_af_continuous(const SystemParams& p, const DerivedConstants& dc,
                                const ChannelBlock& blk, const RelayState& /*state*/) {
    BlockOutcome o;
    const double need = dc.d1m * p.relay_power;
    o.alpha = need / (2.0 * p.conversion_efficiency * p.source_power * blk.h2 + need);
    o.outage = af_snr_cached(p, dc, blk, p.relay_power) < p.snr_threshold;
    o.tau = block_tau(o.outage, o.alpha);
    // Whatever is harvested is spent in the same block.
    o.harvested = harvest(p, dc, blk.h2, o.alpha);
    o.consumed = o.harvested;
    o.energy_in = 0.0;
    o.energy_out = 0.0;
    return o;
}

StepResult step_af_discrete(const SystemParams& p, const DerivedConstants& dc,
                            const ChannelBlock& blk, const RelayState& state) {
    const double spend = p.it_energy();
    if (state.battery < spend) {
        BlockOutcome o = eh_only(p, dc, blk, state.battery);
        return {o, {o.energy_out, state.protocol_id}};
    }
    BlockOutcome o;
    o.alpha = 0.0;
    o.outage = af_snr_cached(p, dc, blk, p.relay_power) < p.snr_threshold;
    o.tau = block_tau(o.outage, 0.0);
    o.energy_in = state.battery;
    o.consumed = spend;
    o.energy_out = state.battery - spend;
    return {o, {o.energy_out, state.protocol_id}};
}

StepResult step_df_continuous(const SystemParams& p, const DerivedConstants& dc,
                              const ChannelBlock& blk, const RelayState& state) {
    if (blk.h2 < dc.a_bar) {
        BlockOutcome o = eh_only(p, dc, blk, state.battery);
        o.relay_outage = true;
        return {o, {o.energy_out, state.protocol_id}};
    }
    const double spend = p.it_energy();
    BlockOutcome o;
    o.energy_in = state.battery;
    o.outage = blk.g2 < dc.b_bar;
    if (state.battery >= spend) {
        o.alpha = 0.0;
        o.consumed = spend;
        o.energy_out = state.battery - spend;
    } else {
        const double T = p.block_time;
        o.alpha = (dc.d1m * p.relay_power * T - 2.0 * state.battery * dc.d1m) /
                  (2.0 * p.conversion_efficiency * p.source_power * blk.h2 * T +
                   dc.d1m * p.relay_power * T);
        o.harvested = harvest(p, dc, blk.h2, o.alpha);
        o.consumed = state.battery + o.harvested;
        o.energy_out = 0.0;
    }
    o.tau = block_tau(o.outage, o.alpha);
    return {o, {o.energy_out, state.protocol_id}};
}

StepResult step_df_discrete(const SystemParams& p, const DerivedConstants& dc,
                            const ChannelBlock& blk, const RelayState& state) {
    const double spend = p.it_energy();
    const bool relay_out = blk.h2 < dc.a_bar;
    if (state.battery < spend || relay_out) {
        BlockOutcome o = eh_only(p, dc, blk, state.battery);
        o.relay_outage = relay_out;
        return {o, {o.energy_out, state.protocol_id}};
    }
    BlockOutcome o;
    o.alpha = 0.0;
    o.outage = blk.g2 < dc.b_bar;
    o.tau = block_tau(o.outage, 0.0);
    o.energy_in = state.battery;
    o.consumed = spend;
    o.energy_out = state.battery - spend;
    return {o, {o.energy_out, state.protocol_id}};
}

BlockOutcome step_baseline_fixed(const SystemParams& p, const DerivedConstants& dc,
                                 const ChannelBlock& blk, double fixed_alpha) {
    if (!(fixed_alpha > 0.0 && fixed_alpha < 1.0)) {
        throw std::domain_error("baseline harvesting fraction must lie in (0, 1)");
    }
    BlockOutcome o;
    o.alpha = fixed_alpha;
    o.harvested = harvest(p, dc, blk.h2, fixed_alpha);
    o.consumed = o.harvested;
    // All harvested energy is radiated over the remaining (1 - alpha) T / 2.
    const double relay_power = 2.0 * o.harvested / ((1.0 - fixed_alpha) * p.block_time);
    o.outage = !(relay_power > 0.0) || af_snr_cached(p, dc, blk, relay_power) < p.snr_threshold;
    o.tau = block_tau(o.outage, fixed_alpha);
    return o;
}

BlockOutcome step_baseline_fixed(const SystemParams& p, const ChannelBlock& blk,
                                 double fixed_alpha) {
    DerivedConstants dc;
    dc.d1m = p.path_loss_sr();
    dc.d2m = p.path_loss_rd();
    return step_baseline_fixed(p, dc, blk, fixed_alpha);
}

StepResult step(const SystemParams& p, const DerivedConstants& dc, const ChannelBlock& blk,
                const RelayState& state, double baseline_alpha) {
    switch (state.protocol_id) {
        case ProtocolId::AF_CONT:
            return {step_af_continuous(p, dc, blk, state), {0.0, state.protocol_id}};
        case ProtocolId::AF_DISC: return step_af_discrete(p, dc, blk, state);
        case ProtocolId::DF_CONT: return step_df_continuous(p, dc, blk, state);
        case ProtocolId::DF_DISC: return step_df_discrete(p, dc, blk, state);
        case ProtocolId::BASELINE_FIXED:
            return {step_baseline_fixed(p, dc, blk, baseline_alpha), {0.0, state.protocol_id}};
    }
    throw std::invalid_argument("unknown protocol id");
}

}  // namespace ehrelay
