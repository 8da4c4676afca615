// SPDX-License-Identifier: Apache-2.0
//
// lisim - link-level simulator for uplink large-intelligent-surface systems
// Copyright (C) 2026 the lisim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef LISIM_CONFIG_HPP
#define LISIM_CONFIG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lisim {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error("config key '" + key + "': " + message), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

enum class RateUnits { nats, bits };

inline double rate_unit_scale(RateUnits units) noexcept {
    return units == RateUnits::bits ? 1.4426950408889634074 : 1.0;  // 1/ln 2
}

// All scalar model parameters. Defaults reproduce the indoor reference
// scenario: a 4 m x 4 m device plane at z = 1 m above the surface.
struct SystemConfig {
    double lambda = 0.1;   // carrier wavelength [m]
    double L = 0.25;       // unit half-side; each unit spans 2L x 2L [m]
    int M = 100;           // antennas per unit (perfect square)
    double d_m = 1.0;      // device grid pitch [m]
    double z = 1.0;        // device height above the surface plane [m]
    std::array<double, 2> region_x = {-2.0, 2.0};
    std::array<double, 2> region_y = {0.0, 4.0};
    double target_snr_db = 3.0;  // per-antenna received SNR enforced by power control
    double tau_sq = 0.5;         // channel estimation error variance, in [0, 1)
    double beta_pl = 3.7;        // NLOS path-loss exponent
    int P = 10;                  // dominant NLOS paths per interfering pair
    std::int64_t trials = 10000;
    std::uint64_t seed = 1;
    RateUnits rate_units = RateUnits::nats;

    // LOS-state model constants (indoor-hotspot style curve, overridable).
    double los_d0 = 1.2;        // distance below which LOS is certain [m]
    double los_decay = 4.7;     // exponential decay scale beyond los_d0 [m]
    double kappa_mean_db = 9.0; // Rician factor draw: Normal(mean, std^2) in dB
    double kappa_std_db = 5.0;

    double target_snr() const noexcept { return std::pow(10.0, target_snr_db / 10.0); }
    int sqrt_m() const noexcept { return static_cast<int>(std::lround(std::sqrt(double(M)))); }
    double antenna_spacing() const noexcept { return 2.0 * L / sqrt_m(); }

    void validate() const {
        if (!(lambda > 0)) throw ConfigError("lambda", "must be > 0");
        if (!(L > 0)) throw ConfigError("L", "must be > 0");
        const int n = sqrt_m();
        if (M < 1 || n * n != M) throw ConfigError("M", "must be a positive perfect square");
        if (!(d_m > 0)) throw ConfigError("d_m", "must be > 0");
        if (!(z > 0)) throw ConfigError("z", "must be > 0");
        if (!(region_x[0] <= region_x[1])) throw ConfigError("region_x", "empty region");
        if (!(region_y[0] <= region_y[1])) throw ConfigError("region_y", "empty region");
        if (!(tau_sq >= 0 && tau_sq < 1)) throw ConfigError("tau_sq", "must lie in [0, 1)");
        if (!(beta_pl > 0)) throw ConfigError("beta_pl", "must be > 0");
        if (P < 1) throw ConfigError("P", "must be >= 1");
        if (trials < 1) throw ConfigError("trials", "must be >= 1");
        if (!(target_snr() >= 0)) throw ConfigError("target_snr_db", "must be finite");
        if (!(los_d0 >= 0)) throw ConfigError("los_d0", "must be >= 0");
        if (!(los_decay > 0)) throw ConfigError("los_decay", "must be > 0");
        if (!(kappa_std_db >= 0)) throw ConfigError("kappa_std_db", "must be >= 0");
    }

    bool operator==(const SystemConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a number, got '" + value + "'");
    }
}

inline std::int64_t parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const std::int64_t v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected an integer, got '" + value + "'");
    }
}

inline std::array<double, 2> parse_range(const std::string& key, std::string value) {
    for (auto& ch : value)
        if (ch == ',') ch = ' ';
    std::istringstream in(value);
    std::array<double, 2> range{};
    if (!(in >> range[0] >> range[1]))
        throw ConfigError(key, "expected two numbers 'lo hi', got '" + value + "'");
    std::string rest;
    if (in >> rest) throw ConfigError(key, "trailing input '" + rest + "'");
    return range;
}

}  // namespace detail

// Applies one "key = value" assignment. Unknown keys are rejected by name.
inline void apply_config_key(SystemConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_double;
    using detail::parse_int;
    using detail::parse_range;
    if (key == "lambda") cfg.lambda = parse_double(key, value);
    else if (key == "L") cfg.L = parse_double(key, value);
    else if (key == "M") cfg.M = static_cast<int>(parse_int(key, value));
    else if (key == "d_m") cfg.d_m = parse_double(key, value);
    else if (key == "z") cfg.z = parse_double(key, value);
    else if (key == "region_x") cfg.region_x = parse_range(key, value);
    else if (key == "region_y") cfg.region_y = parse_range(key, value);
    else if (key == "target_snr_db") cfg.target_snr_db = parse_double(key, value);
    else if (key == "tau_sq") cfg.tau_sq = parse_double(key, value);
    else if (key == "beta_pl") cfg.beta_pl = parse_double(key, value);
    else if (key == "P") cfg.P = static_cast<int>(parse_int(key, value));
    else if (key == "trials") cfg.trials = parse_int(key, value);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "rate_units") {
        if (value == "nats") cfg.rate_units = RateUnits::nats;
        else if (value == "bits") cfg.rate_units = RateUnits::bits;
        else throw ConfigError(key, "expected 'nats' or 'bits', got '" + value + "'");
    }
    else if (key == "los_d0") cfg.los_d0 = parse_double(key, value);
    else if (key == "los_decay") cfg.los_decay = parse_double(key, value);
    else if (key == "kappa_mean_db") cfg.kappa_mean_db = parse_double(key, value);
    else if (key == "kappa_std_db") cfg.kappa_std_db = parse_double(key, value);
    else throw ConfigError(key, "unknown key");
}

// Parses flat key-value text ('#' starts a comment). Unset keys keep the
// reference-scenario defaults; the result is validated before returning.
inline SystemConfig parse_config(std::istream& in) {
    SystemConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string text = detail::trim(line);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(text, "line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = detail::trim(text.substr(0, eq));
        const std::string value = detail::trim(text.substr(eq + 1));
        if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
        apply_config_key(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

inline SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read '" + path + "'");
    return parse_config(in);
}

// Serializes round-trip exact: parse(serialize(cfg)) == cfg.
inline std::string serialize_config(const SystemConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    const auto range = [](const std::array<double, 2>& r) {
        std::ostringstream s;
        s.precision(17);
        s << r[0] << ' ' << r[1];
        return s.str();
    };
    out << "lambda = " << cfg.lambda << '\n'
        << "L = " << cfg.L << '\n'
        << "M = " << cfg.M << '\n'
        << "d_m = " << cfg.d_m << '\n'
        << "z = " << cfg.z << '\n'
        << "region_x = " << range(cfg.region_x) << '\n'
        << "region_y = " << range(cfg.region_y) << '\n'
        << "target_snr_db = " << cfg.target_snr_db << '\n'
        << "tau_sq = " << cfg.tau_sq << '\n'
        << "beta_pl = " << cfg.beta_pl << '\n'
        << "P = " << cfg.P << '\n'
        << "trials = " << cfg.trials << '\n'
        << "seed = " << cfg.seed << '\n'
        << "rate_units = " << (cfg.rate_units == RateUnits::bits ? "bits" : "nats") << '\n'
        << "los_d0 = " << cfg.los_d0 << '\n'
        << "los_decay = " << cfg.los_decay << '\n'
        << "kappa_mean_db = " << cfg.kappa_mean_db << '\n'
        << "kappa_std_db = " << cfg.kappa_std_db << '\n';
    return out.str();
}

}  // namespace lisim

#endif  // LISIM_CONFIG_HPP
