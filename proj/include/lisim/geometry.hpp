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

#ifndef LISIM_GEOMETRY_HPP
#define LISIM_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "lisim/config.hpp"

namespace lisim {

// Single-antenna uplink device. The surface lies in the z = 0 plane and the
// device hovers at z_k > 0 above the centre of its unit.
struct Device {
    int id = 0;
    double x = 0, y = 0, z = 0;
    double rho = 0;  // transmit SNR (linear), set by power control
};

// One 2L x 2L square subarray of the surface serving one device. Antennas sit
// on a cell-centred sqrt(M) x sqrt(M) lattice, so none lie on the unit edge.
struct LisUnit {
    int device_id = 0;
    double center_x = 0, center_y = 0;
    double half_side = 0;  // L
    double spacing = 0;    // dL = 2L / sqrt(M)
    int side = 0;          // sqrt(M)

    int antennas() const noexcept { return side * side; }

    // Antenna-major order: m = row * side + col, rows along y, cols along x.
    double antenna_x(int m) const noexcept { return center_x + offset(m % side); }
    double antenna_y(int m) const noexcept { return center_y + offset(m / side); }

private:
    double offset(int i) const noexcept {
        return (i + 0.5) * spacing - half_side;
    }
};

// Partition of devices into sets whose units do not overlap; devices in
// different groups are served on orthogonal resources and do not interfere.
struct ResourceGroups {
    std::vector<std::vector<int>> groups;  // device ids per group
    std::vector<int> group_of;             // indexed by device id

    std::size_t count() const noexcept { return groups.size(); }
};

// Power control: the per-antenna received SNR at the unit-centre antenna
// (boresight distance z_k, combined gain and path loss 1/(4 pi z_k^2))
// equals the target SNR.
inline double set_transmit_power(const Device& device, double target_snr) noexcept {
    return target_snr * 4.0 * std::numbers::pi * device.z * device.z;
}

// Rectangular device lattice with pitch d_m filling the configured region,
// boundaries included.
inline std::vector<Device> build_device_grid(const SystemConfig& cfg) {
    if (!(cfg.d_m > 0)) throw ConfigError("d_m", "must be > 0");
    if (cfg.region_x[0] > cfg.region_x[1] || cfg.region_y[0] > cfg.region_y[1])
        throw ConfigError("region_x", "empty region");

    const auto steps = [&](const std::array<double, 2>& r) {
        const double span = r[1] - r[0];
        return 1 + static_cast<int>(std::floor(span / cfg.d_m + 1e-9));
    };
    const int nx = steps(cfg.region_x);
    const int ny = steps(cfg.region_y);

    std::vector<Device> devices;
    devices.reserve(static_cast<std::size_t>(nx) * ny);
    const double target = cfg.target_snr();
    int id = 0;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            Device d;
            d.id = id++;
            d.x = cfg.region_x[0] + ix * cfg.d_m;
            d.y = cfg.region_y[0] + iy * cfg.d_m;
            d.z = cfg.z;
            d.rho = set_transmit_power(d, target);
            devices.push_back(d);
        }
    }
    return devices;
}

inline LisUnit build_lis_unit(const Device& device, const SystemConfig& cfg) {
    const int n = cfg.sqrt_m();
    if (n * n != cfg.M || cfg.M < 1) throw ConfigError("M", "must be a positive perfect square");
    LisUnit unit;
    unit.device_id = device.id;
    unit.center_x = device.x;
    unit.center_y = device.y;
    unit.half_side = cfg.L;
    unit.side = n;
    unit.spacing = cfg.antenna_spacing();
    return unit;
}

inline std::vector<LisUnit> build_lis_units(const std::vector<Device>& devices,
                                            const SystemConfig& cfg) {
    std::vector<LisUnit> units;
    units.reserve(devices.size());
    for (const auto& d : devices) units.push_back(build_lis_unit(d, cfg));
    return units;
}

// Positive-area intersection of the two unit squares; edge contact does not
// count, so adjacent units at pitch 2L stay on the same resource.
inline bool units_overlap(const LisUnit& a, const LisUnit& b) noexcept {
    return std::abs(a.center_x - b.center_x) < a.half_side + b.half_side &&
           std::abs(a.center_y - b.center_y) < a.half_side + b.half_side;
}

// Greedy colouring of the overlap graph in canonical (device id) order, so
// the grouping is deterministic and independent of input ordering.
inline ResourceGroups assign_resource_groups(const std::vector<LisUnit>& units) {
    std::vector<const LisUnit*> ordered;
    ordered.reserve(units.size());
    int max_id = -1;
    for (const auto& u : units) {
        ordered.push_back(&u);
        max_id = std::max(max_id, u.device_id);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const LisUnit* a, const LisUnit* b) { return a->device_id < b->device_id; });

    ResourceGroups out;
    out.group_of.assign(static_cast<std::size_t>(max_id) + 1, -1);
    for (const LisUnit* unit : ordered) {
        std::vector<char> used(out.groups.size(), 0);
        for (const LisUnit* other : ordered) {
            if (other == unit) continue;
            const int g = out.group_of[other->device_id];
            if (g >= 0 && units_overlap(*unit, *other)) used[g] = 1;
        }
        std::size_t color = 0;
        while (color < used.size() && used[color]) ++color;
        if (color == out.groups.size()) out.groups.emplace_back();
        out.groups[color].push_back(unit->device_id);
        out.group_of[unit->device_id] = static_cast<int>(color);
    }
    return out;
}

}  // namespace lisim

#endif  // LISIM_GEOMETRY_HPP
