#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace ehrelay {

/// Raised when a parameter set is incomplete, non-finite, or violates a
/// physical invariant. The message names the failing key or invariant.
class ParamError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Physical link parameters, always in linear units (watts, meters, ratios).
/// The block time is normalized to one second, so per-block energies are
/// numerically equal to average powers.
struct SystemParams {
    double source_power = 0.0;          // Ps [W]
    double relay_power = 0.0;           // Pr [W], preset relay transmit power
    double conversion_efficiency = 0.0; // eta
    double path_loss_exponent = 0.0;    // m
    double dist_sr = 0.0;               // d1 [m]
    double dist_rd = 0.0;               // d2 [m]
    double noise_relay = 0.0;           // sigma^2_nr [W]
    double noise_dest = 0.0;            // sigma^2_nd [W]
    double snr_threshold = 0.0;         // gamma_o (linear)
    double block_time = 1.0;            // T [s]

    /// Throws ParamError naming the first violated invariant.
    void validate() const;

    double path_loss_sr() const;  // d1^m
    double path_loss_rd() const;  // d2^m

    /// Energy one IT block consumes at the relay, Pr*T/2.
    double it_energy() const { return relay_power * block_time / 2.0; }
};

/// Shorthand symbols shared by the closed-form throughput expressions.
struct DerivedConstants {
    double a = 0.0;      // Ps d2^m sigma_nd gamma_o
    double b = 0.0;      // d1^m d2^m sigma_nr sigma_nd gamma_o
    double c = 0.0;      // Ps Pr
    double d = 0.0;      // Pr d1^m sigma_nr gamma_o
    double u = 0.0;      // sqrt(4 (a d + b c) / c^2)
    double a_bar = 0.0;  // relay-outage threshold on |h|^2
    double b_bar = 0.0;  // destination-outage threshold on |g|^2 (DF)
    double rho = 0.0;    // mean harvested energy per full EH block

    // Cached path-loss factors, used on every simulated block.
    double d1m = 0.0;
    double d2m = 0.0;
};

DerivedConstants derive_constants(const SystemParams& p);

/// Flat key/value configuration in logarithmic units at the boundary:
/// ps_dbm, pr_dbm, eta, m, d1_m, d2_m, sigma_nr_dbm, sigma_nd_dbm, gamma_o_db
/// (and optionally seed, which is not a physical parameter).
using DbConfig = std::map<std::string, double>;

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);
double linear_to_db(double linear);

/// Converts a dB/dBm configuration into validated linear-unit parameters.
/// Throws ParamError on a missing key, a non-finite value, or an invariant
/// violated after conversion.
SystemParams from_db_config(const DbConfig& config);

/// Inverse of from_db_config for the physical keys.
DbConfig to_db_config(const SystemParams& p);

/// The reference parameter set: Ps = 46 dBm, Pr = 0 dBm, eta = 0.5, m = 3,
/// d1 = 35 m, d2 = 10 m, sigma_nr = -70 dBm, sigma_nd = -100 dBm,
/// gamma_o = 60 dB.
DbConfig default_db_config();
SystemParams default_params();

/// Parses a JSON object with the flat keys above. Unknown keys are rejected.
DbConfig parse_db_config_json(const std::string& text);
DbConfig load_db_config_file(const std::string& path);

bool is_known_config_key(const std::string& key);

}  // namespace ehrelay
