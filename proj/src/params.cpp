#include "ehrelay/params.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include <json.hpp>

namespace ehrelay {

namespace {

constexpr std::array<std::string_view, 9> kPhysicalKeys = {
    "ps_dbm", "pr_dbm", "eta", "m", "d1_m", "d2_m",
    "sigma_nr_dbm", "sigma_nd_dbm", "gamma_o_db"};

double require(const DbConfig& config, std::string_view key) {
    auto it = config.find(std::string(key));
    if (it == config.end()) {
        throw ParamError("missing config key: " + std::string(key));
    }
    if (!std::isfinite(it->second)) {
        throw ParamError("non-finite value for config key: " + std::string(key));
    }
    return it->second;
}

void check(bool ok, const char* invariant) {
    if (!ok) {
        throw ParamError(std::string("invariant violated: ") + invariant);
    }
}

void check_positive_finite(double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) {
        throw ParamError(std::string("invariant violated: ") + name + " > 0");
    }
}

}  // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

void SystemParams::validate() const {
    check_positive_finite(source_power, "Ps");
    check_positive_finite(relay_power, "Pr");
    check(std::isfinite(conversion_efficiency) && conversion_efficiency > 0.0 &&
              conversion_efficiency < 1.0,
          "0 < eta < 1");
    check(std::isfinite(path_loss_exponent) && path_loss_exponent >= 2.0, "m >= 2");
    check_positive_finite(dist_sr, "d1");
    check_positive_finite(dist_rd, "d2");
    check_positive_finite(noise_relay, "sigma_nr");
    check_positive_finite(noise_dest, "sigma_nd");
    check_positive_finite(snr_threshold, "gamma_o");
    check_positive_finite(block_time, "T");
}

double SystemParams::path_loss_sr() const { return std::pow(dist_sr, path_loss_exponent); }
double SystemParams::path_loss_rd() const { return std::pow(dist_rd, path_loss_exponent); }

DerivedConstants derive_constants(const SystemParams& p) {
    p.validate();
    DerivedConstants dc;
    dc.d1m = p.path_loss_sr();
    dc.d2m = p.path_loss_rd();
    const double g = p.snr_threshold;
    dc.a = p.source_power * dc.d2m * p.noise_dest * g;
    dc.b = dc.d1m * dc.d2m * p.noise_relay * p.noise_dest * g;
    dc.c = p.source_power * p.relay_power;
    dc.d = p.relay_power * dc.d1m * p.noise_relay * g;
    // u^2 = 4 (a d / c^2 + b / c); the split keeps the intermediates in range.
    dc.u = 2.0 * std::sqrt((dc.a / dc.c) * (dc.d / dc.c) + dc.b / dc.c);
    dc.a_bar = g * dc.d1m * p.noise_relay / p.source_power;
    dc.b_bar = g * dc.d2m * p.noise_dest / p.relay_power;
    dc.rho = p.conversion_efficiency * p.source_power * p.block_time / dc.d1m;

    const double all[] = {dc.a, dc.b, dc.c, dc.d, dc.u, dc.a_bar, dc.b_bar, dc.rho,
                          dc.d1m, dc.d2m};
    for (double v : all) {
        if (!std::isfinite(v) || v <= 0.0) {
            throw ParamError("derived constants overflowed or vanished; parameter scales are pathological");
        }
    }
    return dc;
}

SystemParams from_db_config(const DbConfig& config) {
    SystemParams p;
    p.source_power = dbm_to_watts(require(config, "ps_dbm"));
    p.relay_power = dbm_to_watts(require(config, "pr_dbm"));
    p.conversion_efficiency = require(config, "eta");
    p.path_loss_exponent = require(config, "m");
    p.dist_sr = require(config, "d1_m");
    p.dist_rd = require(config, "d2_m");
    p.noise_relay = dbm_to_watts(require(config, "sigma_nr_dbm"));
    p.noise_dest = dbm_to_watts(require(config, "sigma_nd_dbm"));
    p.snr_threshold = db_to_linear(require(config, "gamma_o_db"));
    p.block_time = 1.0;
    p.validate();
    return p;
}

DbConfig to_db_config(const SystemParams& p) {
    return {
        {"ps_dbm", watts_to_dbm(p.source_power)},
        {"pr_dbm", watts_to_dbm(p.relay_power)},
        {"eta", p.conversion_efficiency},
        {"m", p.path_loss_exponent},
        {"d1_m", p.dist_sr},
        {"d2_m", p.dist_rd},
        {"sigma_nr_dbm", watts_to_dbm(p.noise_relay)},
        {"sigma_nd_dbm", watts_to_dbm(p.noise_dest)},
        {"gamma_o_db", linear_to_db(p.snr_threshold)},
    };
}

DbConfig default_db_config() {
    return {
        {"ps_dbm", 46.0},       {"pr_dbm", 0.0},          {"eta", 0.5},
        {"m", 3.0},             {"d1_m", 35.0},           {"d2_m", 10.0},
        {"sigma_nr_dbm", -70.0}, {"sigma_nd_dbm", -100.0}, {"gamma_o_db", 60.0},
    };
}

SystemParams default_params() { return from_db_config(default_db_config()); }

bool is_known_config_key(const std::string& key) {
    if (key == "seed") return true;
    for (auto k : kPhysicalKeys) {
        if (k == key) return true;
    }
    return false;
}

DbConfig parse_db_config_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParamError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ParamError("config must be a JSON object with flat keys");
    }
    DbConfig out;
    for (const auto& [key, value] : j.items()) {
        if (!is_known_config_key(key)) {
            throw ParamError("unknown config key: " + key);
        }
        if (!value.is_number()) {
            throw ParamError("config key is not a number: " + key);
        }
        out[key] = value.get<double>();
    }
    return out;
}

DbConfig load_db_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParamError("cannot read config file: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_db_config_json(ss.str());
}

}  // namespace ehrelay
