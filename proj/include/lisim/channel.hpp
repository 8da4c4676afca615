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

#ifndef LISIM_CHANNEL_HPP
#define LISIM_CHANNEL_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "lisim/config.hpp"
#include "lisim/geometry.hpp"
#include "lisim/rng.hpp"

namespace lisim {

using cxd = std::complex<double>;

// Minimal dense row-major complex matrix; enough for correlation roots and
// the small-instance test paths.
struct CxMatrix {
    int rows = 0, cols = 0;
    std::vector<cxd> data;

    CxMatrix() = default;
    CxMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {}

    cxd& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    const cxd& operator()(int r, int c) const {
        return data[static_cast<std::size_t>(r) * cols + c];
    }
};

// Deterministic desired channel between a device and its own unit.
struct LosChannel {
    std::vector<cxd> h;          // complex entries, antenna-major
    std::vector<double> gain;    // per-antenna amplitude beta_m
    std::vector<double> dist;    // per-antenna distance d_m [m]
};

// NLOS path directions for one interfering pair. Angles are elevation /
// azimuth in [-pi/2, pi/2]; phi are the effective spatial frequencies.
struct PathSet {
    std::vector<double> theta_v, theta_h;

    int count() const noexcept { return static_cast<int>(theta_v.size()); }
    double phi_v(int p) const noexcept { return std::sin(theta_v[p]); }
    double phi_h(int p) const noexcept { return std::sin(theta_h[p]) * std::cos(theta_h[p]); }
    double gain(int p) const noexcept {
        return std::sqrt(std::cos(theta_v[p]) * std::cos(theta_h[p]));
    }
};

// Square root of the NLOS spatial correlation matrix, M x P. Column p is the
// per-antenna path loss times the gain-scaled steering vector of path p.
struct CorrelationRoot {
    CxMatrix root;
};

struct InterferenceChannel {
    std::vector<cxd> h;
    double kappa = 0;  // linear Rician factor
};

// Per-trial randomness for one resource group, materialized. The fast
// simulation kernel draws the same streams inline and never builds this.
struct FadingDraw {
    std::vector<std::vector<cxd>> e;              // per device: M estimation errors
    std::vector<std::vector<std::vector<cxd>>> g; // [k][j-slot]: P fading taps
};

inline constexpr double kappa_pure_los_cap = 1e6;  // kappa at or above acts as pure LOS

struct RicianMix {
    double c_los = 0, c_nlos = 0;
};

inline RicianMix rician_mix(double kappa) noexcept {
    if (kappa >= kappa_pure_los_cap) return {1.0, 0.0};
    return {std::sqrt(kappa / (kappa + 1.0)), std::sqrt(1.0 / (kappa + 1.0))};
}

// LOS vector between an arbitrary device and a unit: entry m has amplitude
// sqrt(z/d) / sqrt(4 pi d^2) and phase -2 pi d / lambda, with d the exact
// device-to-antenna distance. Passing the unit's own device gives h_kk.
inline LosChannel los_channel(const Device& device, const LisUnit& unit, double lambda) {
    const int m_count = unit.antennas();
    LosChannel ch;
    ch.h.resize(m_count);
    ch.gain.resize(m_count);
    ch.dist.resize(m_count);
    const double four_pi = 4.0 * std::numbers::pi;
    const double wave_k = -2.0 * std::numbers::pi / lambda;
    for (int m = 0; m < m_count; ++m) {
        const double dx = device.x - unit.antenna_x(m);
        const double dy = device.y - unit.antenna_y(m);
        const double d = std::sqrt(dx * dx + dy * dy + device.z * device.z);
        const double beta = std::sqrt(device.z / d) / std::sqrt(four_pi * d * d);
        ch.dist[m] = d;
        ch.gain[m] = beta;
        ch.h[m] = std::polar(beta, wave_k * d);
    }
    return ch;
}

inline double norm_sq(const std::vector<cxd>& v) noexcept {
    double acc = 0;
    for (const auto& x : v) acc += std::norm(x);
    return acc;
}

// One axis factor of the planar-array response: entry a is
// exp(j 2 pi dL a phi / lambda), a = 0..n-1.
inline std::vector<cxd> steering_axis(double phi, int n, double spacing, double lambda) {
    std::vector<cxd> d(n);
    const double step = 2.0 * std::numbers::pi * spacing * phi / lambda;
    for (int a = 0; a < n; ++a) d[a] = std::polar(1.0, step * a);
    return d;
}

// Unit-norm planar steering vector (1/sqrt(M)) d_v kron d_h, entry
// m = a * sqrt(M) + b pairing vertical index a with horizontal index b.
inline std::vector<cxd> steering_vector(double phi_v, double phi_h, int m_count,
                                        double spacing, double lambda) {
    const int n = static_cast<int>(std::lround(std::sqrt(double(m_count))));
    if (n * n != m_count) throw ConfigError("M", "must be a positive perfect square");
    const auto dv = steering_axis(phi_v, n, spacing, lambda);
    const auto dh = steering_axis(phi_h, n, spacing, lambda);
    std::vector<cxd> d(static_cast<std::size_t>(m_count));
    const double scale = 1.0 / std::sqrt(double(m_count));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) d[static_cast<std::size_t>(a) * n + b] = scale * dv[a] * dh[b];
    return d;
}

// Per-antenna NLOS path loss d^(-beta/2) from a device to every antenna of a
// unit.
inline std::vector<double> nlos_pathloss(const Device& device, const LisUnit& unit,
                                         double beta_pl) {
    const int m_count = unit.antennas();
    std::vector<double> l(m_count);
    for (int m = 0; m < m_count; ++m) {
        const double dx = device.x - unit.antenna_x(m);
        const double dy = device.y - unit.antenna_y(m);
        const double d = std::sqrt(dx * dx + dy * dy + device.z * device.z);
        l[m] = std::pow(d, -0.5 * beta_pl);
    }
    return l;
}

// Materialized M x P correlation root: column p = pathloss .* alpha_p * d(phi_p).
inline CorrelationRoot correlation_root(const PathSet& paths, const std::vector<double>& pathloss,
                                        double spacing, double lambda) {
    const int m_count = static_cast<int>(pathloss.size());
    const int p_count = paths.count();
    CorrelationRoot out;
    out.root = CxMatrix(m_count, p_count);
    for (int p = 0; p < p_count; ++p) {
        const auto column = steering_vector(paths.phi_v(p), paths.phi_h(p), m_count,
                                            spacing, lambda);
        const double alpha = paths.gain(p);
        for (int m = 0; m < m_count; ++m) out.root(m, p) = pathloss[m] * alpha * column[m];
    }
    return out;
}

// h_jk = sqrt(kappa/(kappa+1)) h_los + sqrt(1/(kappa+1)) R^{1/2} g.
inline InterferenceChannel rician_channel(double kappa, const std::vector<cxd>& h_los,
                                          const CorrelationRoot& corr,
                                          const std::vector<cxd>& g) {
    const auto mix = rician_mix(kappa);
    const int m_count = static_cast<int>(h_los.size());
    const int p_count = corr.root.cols;
    InterferenceChannel ch;
    ch.kappa = kappa;
    ch.h.assign(m_count, cxd{});
    for (int m = 0; m < m_count; ++m) {
        cxd nlos{};
        if (mix.c_nlos > 0)
            for (int p = 0; p < p_count; ++p) nlos += corr.root(m, p) * g[p];
        ch.h[m] = mix.c_los * h_los[m] + mix.c_nlos * nlos;
    }
    return ch;
}

// MF receiver built from the least-squares channel estimate:
// f = h + sqrt(tau^2 / (1 - tau^2)) e.
inline std::vector<cxd> receiver_filter(const std::vector<cxd>& h, double tau_sq,
                                        const std::vector<cxd>& e) {
    if (!(tau_sq >= 0 && tau_sq < 1)) throw ConfigError("tau_sq", "must lie in [0, 1)");
    const double w = std::sqrt(tau_sq / (1.0 - tau_sq));
    std::vector<cxd> f(h.size());
    for (std::size_t m = 0; m < h.size(); ++m) f[m] = h[m] + w * e[m];
    return f;
}

// ---------------------------------------------------------------------------
// LOS-state model: indoor-hotspot style LOS probability over horizontal
// distance, and a log-normal Rician factor for LOS pairs.

struct LosStateModel {
    double d0 = 1.2;          // LOS certain below this distance [m]
    double decay = 4.7;       // exponential decay scale [m]
    double kappa_mean_db = 9.0;
    double kappa_std_db = 5.0;

    static LosStateModel from_config(const SystemConfig& cfg) noexcept {
        return {cfg.los_d0, cfg.los_decay, cfg.kappa_mean_db, cfg.kappa_std_db};
    }
};

inline double los_probability(double dist, const LosStateModel& model) noexcept {
    if (dist <= model.d0) return 1.0;
    return std::exp(-(dist - model.d0) / model.decay);
}

// Drawn channel state for one ordered interfering pair (j, k); fixed per
// geometry, never resampled across trials.
struct PairModel {
    int j = 0, k = 0;   // device ids
    bool los = false;
    double kappa = 0;   // 0 when NLOS
    PathSet paths;
};

// Draw order is fixed (LOS uniform, Rician normal, then angles) so forcing
// the LOS state or the factor never shifts the angle draws.
inline PairModel draw_pair_model(std::uint64_t seed, int j_id, int k_id, double horiz_dist,
                                 const LosStateModel& model, int p_count) {
    auto gen = rng::make_stream(seed, rng::Stream::pair_geometry,
                                static_cast<std::uint64_t>(j_id),
                                static_cast<std::uint64_t>(k_id));
    PairModel pair;
    pair.j = j_id;
    pair.k = k_id;
    const double u = gen.uniform();
    const double kappa_db = model.kappa_mean_db + model.kappa_std_db * gen.normal();
    pair.los = u < los_probability(horiz_dist, model);
    pair.kappa = pair.los ? std::pow(10.0, kappa_db / 10.0) : 0.0;
    pair.paths.theta_v.resize(p_count);
    pair.paths.theta_h.resize(p_count);
    for (int p = 0; p < p_count; ++p)
        pair.paths.theta_v[p] = (gen.uniform() - 0.5) * std::numbers::pi;
    for (int p = 0; p < p_count; ++p)
        pair.paths.theta_h[p] = (gen.uniform() - 0.5) * std::numbers::pi;
    return pair;
}

// ---------------------------------------------------------------------------
// Static channel state of one resource group: everything that is fixed
// across Monte Carlo trials.

struct GroupChannel {
    SystemConfig cfg;
    std::vector<Device> devices;      // members of this group
    std::vector<LisUnit> units;       // aligned with devices
    std::vector<LosChannel> desired;  // h_kk per member
    std::vector<double> norm_h_sq;    // ||h_kk||^2 per member
    // Ordered pairs (j, k), j != k, grouped contiguously by receiver k:
    // pairs_of[k] lists the models for all interferers j into unit k.
    std::vector<std::vector<PairModel>> pairs_of;

    int size() const noexcept { return static_cast<int>(devices.size()); }
    int member_index(int device_id) const {
        for (int i = 0; i < size(); ++i)
            if (devices[i].id == device_id) return i;
        return -1;
    }
};

inline double horizontal_distance(const Device& j, const LisUnit& unit_k) noexcept {
    const double dx = j.x - unit_k.center_x;
    const double dy = j.y - unit_k.center_y;
    return std::sqrt(dx * dx + dy * dy);
}

// Builds the per-group static channel state. Pair draws key on global device
// ids, so the same seed and layout give the same channel regardless of how
// units were grouped.
inline GroupChannel build_group_channel(const SystemConfig& cfg,
                                        const std::vector<Device>& all_devices,
                                        const std::vector<LisUnit>& all_units,
                                        const std::vector<int>& member_ids) {
    GroupChannel group;
    group.cfg = cfg;
    const LosStateModel model = LosStateModel::from_config(cfg);
    for (int id : member_ids) {
        group.devices.push_back(all_devices[id]);
        group.units.push_back(all_units[id]);
    }
    const int k_count = group.size();
    group.desired.reserve(k_count);
    for (int k = 0; k < k_count; ++k) {
        group.desired.push_back(los_channel(group.devices[k], group.units[k], cfg.lambda));
        group.norm_h_sq.push_back(norm_sq(group.desired.back().h));
    }
    group.pairs_of.resize(k_count);
    for (int k = 0; k < k_count; ++k) {
        for (int j = 0; j < k_count; ++j) {
            if (j == k) continue;
            const double dist = horizontal_distance(group.devices[j], group.units[k]);
            group.pairs_of[k].push_back(draw_pair_model(cfg.seed, group.devices[j].id,
                                                        group.devices[k].id, dist, model,
                                                        cfg.P));
        }
    }
    return group;
}

// Convenience: whole scenario (devices, units, groups, per-group channels).
struct Scenario {
    SystemConfig cfg;
    std::vector<Device> devices;
    std::vector<LisUnit> units;
    ResourceGroups groups;
    std::vector<GroupChannel> channels;  // one per resource group
};

inline Scenario build_scenario(const SystemConfig& cfg) {
    cfg.validate();
    Scenario s;
    s.cfg = cfg;
    s.devices = build_device_grid(cfg);
    s.units = build_lis_units(s.devices, cfg);
    s.groups = assign_resource_groups(s.units);
    s.channels.reserve(s.groups.count());
    for (const auto& members : s.groups.groups)
        s.channels.push_back(build_group_channel(cfg, s.devices, s.units, members));
    return s;
}

// Static per-pair working vectors in factored form. The correlation root is
// kept as (pathloss, path gains, axis factors); column p of R^{1/2} is
// pathloss .* (alpha_p / sqrt(M)) (axis_v_p kron axis_h_p), which both the
// moment formulas and the trial kernel exploit.
struct PairVectors {
    RicianMix mix;
    std::vector<cxd> h_los;          // M entries; empty when the pair is NLOS
    std::vector<double> pathloss;    // M entries; empty when the pair is pure LOS
    std::vector<double> path_gain;   // P entries alpha_p
    std::vector<cxd> axis_v, axis_h; // P * sqrt(M) entries each, path-major
};

inline PairVectors make_pair_vectors(const GroupChannel& group, int k, const PairModel& pair) {
    const auto& cfg = group.cfg;
    const int j = group.member_index(pair.j);
    const auto& unit_k = group.units[k];
    PairVectors out;
    out.mix = rician_mix(pair.kappa);
    if (out.mix.c_los > 0)
        out.h_los = los_channel(group.devices[j], unit_k, cfg.lambda).h;
    if (out.mix.c_nlos > 0) {
        out.pathloss = nlos_pathloss(group.devices[j], unit_k, cfg.beta_pl);
        const int n = cfg.sqrt_m();
        const int p_count = pair.paths.count();
        out.path_gain.resize(p_count);
        out.axis_v.reserve(static_cast<std::size_t>(p_count) * n);
        out.axis_h.reserve(static_cast<std::size_t>(p_count) * n);
        for (int p = 0; p < p_count; ++p) {
            out.path_gain[p] = pair.paths.gain(p);
            const auto dv = steering_axis(pair.paths.phi_v(p), n, unit_k.spacing, cfg.lambda);
            const auto dh = steering_axis(pair.paths.phi_h(p), n, unit_k.spacing, cfg.lambda);
            out.axis_v.insert(out.axis_v.end(), dv.begin(), dv.end());
            out.axis_h.insert(out.axis_h.end(), dh.begin(), dh.end());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Materialized per-trial draws (modular path; the kernel draws the same
// substreams inline).

inline std::vector<cxd> draw_error_vector(std::uint64_t seed, std::int64_t trial,
                                          int device_id, int m_count) {
    auto gen = rng::make_stream(seed, rng::Stream::trial_error,
                                static_cast<std::uint64_t>(trial),
                                static_cast<std::uint64_t>(device_id));
    std::vector<cxd> e(m_count);
    for (auto& x : e) x = gen.complex_normal();
    return e;
}

inline std::vector<cxd> draw_fading_vector(std::uint64_t seed, std::int64_t trial,
                                           int j_id, int k_id, int p_count) {
    auto gen = rng::make_stream(seed, rng::Stream::trial_fading,
                                static_cast<std::uint64_t>(trial),
                                static_cast<std::uint64_t>(j_id),
                                static_cast<std::uint64_t>(k_id));
    std::vector<cxd> g(p_count);
    for (auto& x : g) x = gen.complex_normal();
    return g;
}

inline std::vector<cxd> draw_noise_vector(std::uint64_t seed, std::int64_t trial,
                                          int device_id, int m_count) {
    auto gen = rng::make_stream(seed, rng::Stream::trial_noise,
                                static_cast<std::uint64_t>(trial),
                                static_cast<std::uint64_t>(device_id));
    std::vector<cxd> n(m_count);
    for (auto& x : n) x = gen.complex_normal();
    return n;
}

inline FadingDraw draw_fading(const GroupChannel& group, std::int64_t trial) {
    FadingDraw draw;
    const int k_count = group.size();
    draw.e.resize(k_count);
    draw.g.resize(k_count);
    for (int k = 0; k < k_count; ++k) {
        draw.e[k] = draw_error_vector(group.cfg.seed, trial, group.devices[k].id, group.cfg.M);
        draw.g[k].reserve(group.pairs_of[k].size());
        for (const auto& pair : group.pairs_of[k])
            draw.g[k].push_back(
                draw_fading_vector(group.cfg.seed, trial, pair.j, pair.k, group.cfg.P));
    }
    return draw;
}

}  // namespace lisim

#endif  // LISIM_CHANNEL_HPP
