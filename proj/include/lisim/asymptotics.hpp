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
//
// Deterministic equivalents of the random SINR terms: the hardened desired
// power, interference moments, the linearized per-device rate, the Gaussian
// sum-rate distribution, and the closed-form outage probability.

#ifndef LISIM_ASYMPTOTICS_HPP
#define LISIM_ASYMPTOTICS_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "lisim/channel.hpp"

namespace lisim {

// Solid-angle parameter of one unit seen from its device and the hardened
// desired-power limit: S_k / M^2 -> p_bar / M^2 as M grows.
struct DesiredPowerLimit {
    double p = 0;      // atan(L^2 / (z sqrt(2 L^2 + z^2))), in (0, pi/2)
    double p_bar = 0;  // M^2 p^2 / (16 pi^2 L^4)

    double sqrt_p_bar() const noexcept { return std::sqrt(p_bar); }
};

inline DesiredPowerLimit desired_power_limit(double z, double L, int M) {
    if (!(z > 0) || !(L > 0)) throw std::domain_error("desired_power_limit: need z > 0, L > 0");
    DesiredPowerLimit out;
    out.p = std::atan(L * L / (z * std::sqrt(2.0 * L * L + z * z)));
    const double l2 = L * L;
    out.p_bar = double(M) * double(M) * out.p * out.p /
                (16.0 * std::numbers::pi * std::numbers::pi * l2 * l2);
    return out;
}

// First and second moments of one interference term Y_jk. In the hardened
// decomposition Y_jk = s |x|^2 + |mu_los|^2 + 2 Re(sqrt(s) mu_los x*) with
// x ~ CN(0,1), so E[Y] = |mu_los|^2 + s (exact under the model) and the
// leading-order Var[Y] = s^2 + 2 s |mu_los|^2.
struct PairMoments {
    cxd mu_los{};          // sqrt((1-tau^2) kappa/(kappa+1)) h_kk^H h_los
    double s_los = 0;      // tau^2 kappa/(kappa+1) ||h_los||^2
    double s_n1 = 0;       // (1-tau^2)/(kappa+1) ||R^{1/2 H} h_kk||^2
    double s_n2 = 0;       // tau^2/(kappa+1) ||R^{1/2}||_F^2

    double s() const noexcept { return s_los + s_n1 + s_n2; }
    double mean_y() const noexcept { return std::norm(mu_los) + s(); }
    double var_y() const noexcept {
        const double sv = s();
        return sv * sv + 2.0 * sv * std::norm(mu_los);
    }
};

// Interference variance model. `hardened_sum` is the leading-order form
// sum_j rho_j^2 Var[Y_jk] with the Y treated as independent across j.
// `exact` evaluates Var[I_k] from the Gaussian structure of (e_k, g_jk):
// conditional Y-variance averaged over the estimation error plus the
// variance of the conditional mean, a quadratic form in e_k whose trace
// and linear parts are kept exactly; only the cross-pair traces between
// NLOS spread matrices (a factor s/|mu|^2 down) are dropped.
enum class VarianceModel { hardened_sum, exact };

namespace detail_asym {

// Extended per-pair statistics for the exact variance. Notation, all for
// receiver k, u = sqrt(1-tau^2) h_kk + tau e:
//   a_j   = c_los u^H h_los_j          (LOS part of u^H h_jk)
//   v_j   = c_nlos R_j^{1/2 H} u       (conditional NLOS spread)
//   Y_jk | e ~ |a_j + v_j^H g|^2, so Var[Y|e] = ||v||^4 + 2 ||v||^2 |a|^2.
struct PairStatsExt {
    PairMoments moments;
    double rho = 0;            // interferer transmit SNR
    double mean_cond_var = 0;  // E_e[ Var[Y | e] ]
    double tr_a_sq = 0;        // tr(A_j^2): quadratic-form trace of |a|^2+||v||^2
    double tr_a = 0;           // tr(A_j)
    double cross_x = 0;        // tr(A_X A_j) / (rho_k tau^4): cL^2|h^H hL|^2 + cN^2||w_raw||^2
    double c_los = 0;
    std::vector<cxd> h_los;    // retained for LOS cross-pair traces
};

inline cxd dot_conj(const cxd* a, const cxd* b, int n) noexcept {
    cxd acc{};
    for (int i = 0; i < n; ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

// y[p] = (R^{1/2})^H x for the factored root, i.e.
// (alpha_p / sqrt(M)) (d_v kron d_h)^H (pathloss .* x).
inline std::vector<cxd> root_adjoint_apply(const PairVectors& vec, const std::vector<cxd>& x,
                                           int n) {
    const int m_count = n * n;
    const int p_count = static_cast<int>(vec.path_gain.size());
    std::vector<cxd> scaled(m_count);
    for (int m = 0; m < m_count; ++m) scaled[m] = vec.pathloss[m] * x[m];
    std::vector<cxd> out(p_count);
    const double inv_sqrt_m = 1.0 / std::sqrt(double(m_count));
    for (int p = 0; p < p_count; ++p) {
        const cxd* dv = vec.axis_v.data() + static_cast<std::size_t>(p) * n;
        const cxd* dh = vec.axis_h.data() + static_cast<std::size_t>(p) * n;
        cxd acc{};
        for (int a = 0; a < n; ++a) {
            cxd row{};
            const cxd* xrow = scaled.data() + static_cast<std::size_t>(a) * n;
            for (int b = 0; b < n; ++b) row += std::conj(dh[b]) * xrow[b];
            acc += std::conj(dv[a]) * row;
        }
        out[p] = vec.path_gain[p] * inv_sqrt_m * acc;
    }
    return out;
}

// x := x + R^{1/2} y for the factored root.
inline void root_apply_accumulate(const PairVectors& vec, const std::vector<cxd>& y, double scale,
                                  int n, std::vector<cxd>& x) {
    const int m_count = n * n;
    const int p_count = static_cast<int>(vec.path_gain.size());
    const double inv_sqrt_m = 1.0 / std::sqrt(double(m_count));
    for (int p = 0; p < p_count; ++p) {
        const cxd w = scale * vec.path_gain[p] * inv_sqrt_m * y[p];
        const cxd* dv = vec.axis_v.data() + static_cast<std::size_t>(p) * n;
        const cxd* dh = vec.axis_h.data() + static_cast<std::size_t>(p) * n;
        for (int a = 0; a < n; ++a) {
            const cxd wa = w * dv[a];
            cxd* xrow = x.data() + static_cast<std::size_t>(a) * n;
            for (int b = 0; b < n; ++b) xrow[b] += vec.pathloss[static_cast<std::size_t>(a) * n + b] * wa * dh[b];
        }
    }
}

// Gram matrix G = (R^{1/2})^H R^{1/2}, P x P.
inline CxMatrix root_gram(const PairVectors& vec, int n) {
    const int m_count = n * n;
    const int p_count = static_cast<int>(vec.path_gain.size());
    CxMatrix gram(p_count, p_count);
    for (int p = 0; p < p_count; ++p) {
        for (int q = p; q < p_count; ++q) {
            const cxd* dvp = vec.axis_v.data() + static_cast<std::size_t>(p) * n;
            const cxd* dhp = vec.axis_h.data() + static_cast<std::size_t>(p) * n;
            const cxd* dvq = vec.axis_v.data() + static_cast<std::size_t>(q) * n;
            const cxd* dhq = vec.axis_h.data() + static_cast<std::size_t>(q) * n;
            cxd acc{};
            for (int a = 0; a < n; ++a) {
                cxd row{};
                const double* lrow = vec.pathloss.data() + static_cast<std::size_t>(a) * n;
                for (int b = 0; b < n; ++b)
                    row += lrow[b] * lrow[b] * std::conj(dhp[b]) * dhq[b];
                acc += std::conj(dvp[a]) * dvq[a] * row;
            }
            const cxd val = vec.path_gain[p] * vec.path_gain[q] / double(m_count) * acc;
            gram(p, q) = val;
            if (q != p) gram(q, p) = std::conj(val);
        }
    }
    return gram;
}

}  // namespace detail_asym

// Computes the pair moments from the factored statics; never materializes
// the M x P correlation root.
inline PairMoments pair_moments(const GroupChannel& group, int k, const PairModel& pair,
                                const PairVectors& vectors) {
    const auto& h_kk = group.desired[k].h;
    const int m_count = static_cast<int>(h_kk.size());
    const int n = group.cfg.sqrt_m();
    const double tau_sq = group.cfg.tau_sq;
    const double kappa = pair.kappa;
    // Rician power splits, with the pure-LOS cap folded in.
    const double frac_los = kappa >= kappa_pure_los_cap ? 1.0 : kappa / (kappa + 1.0);
    const double frac_nlos = kappa >= kappa_pure_los_cap ? 0.0 : 1.0 / (kappa + 1.0);

    PairMoments mom;
    if (frac_los > 0) {
        const cxd a = detail_asym::dot_conj(h_kk.data(), vectors.h_los.data(), m_count);
        mom.mu_los = std::sqrt((1.0 - tau_sq) * frac_los) * a;
        mom.s_los = tau_sq * frac_los * norm_sq(vectors.h_los);
    }
    if (frac_nlos > 0) {
        const auto w_raw = detail_asym::root_adjoint_apply(vectors, h_kk, n);
        double gain_sq = 0, l_sq = 0;
        for (double a : vectors.path_gain) gain_sq += a * a;
        for (double l : vectors.pathloss) l_sq += l * l;
        mom.s_n1 = (1.0 - tau_sq) * frac_nlos * norm_sq(w_raw);
        mom.s_n2 = tau_sq * frac_nlos * gain_sq * l_sq / double(m_count);
    }
    return mom;
}

// Linearized per-device rate R(I) = offset - slope * I around the hardened
// operating point; exact identity offset - slope * mu_I = log(1 + g / mu_I)
// with g = rho p_bar (1 - tau^2).
struct RateLinearization {
    double offset = 0;  // a_k
    double slope = 0;   // b_k
};

inline RateLinearization rate_linearization(double rho, double tau_sq, double p_bar,
                                            double mu_i, RateUnits units = RateUnits::nats) {
    if (!(mu_i > 0)) throw std::domain_error("rate_linearization: mean interference must be > 0");
    const double g = rho * p_bar * (1.0 - tau_sq);
    const double scale = rate_unit_scale(units);
    RateLinearization lin;
    lin.offset = scale * (g / (g + mu_i) + std::log1p(g / mu_i));
    lin.slope = scale * (g / mu_i) / (g + mu_i);
    return lin;
}

// All deterministic equivalents for one device of a group.
struct UnitAsymptotics {
    int device_id = 0;
    double p = 0, p_bar = 0;
    double norm_h_sq = 0;   // exact ||h_kk||^2 on the lattice
    double mu_i = 0;        // mean interference-plus-noise power
    double sigma2_i = 0;    // variance of the interference sum
    double offset = 0, slope = 0;
    std::vector<PairMoments> pairs;  // aligned with group.pairs_of[k]
};

// Gaussian sum-rate law R ~ N(mu, sigma^2) for large M and K.
struct SumRateDistribution {
    double mu = 0;
    double sigma2 = 0;
    std::vector<double> summands;  // per-device contributions to mu

    double sigma() const noexcept { return std::sqrt(sigma2); }
};

// Interference moments for receiver k:
//   mu_I  = rho_k tau^2 ||h_kk||^2 + sum_j rho_j E[Y_jk] + (1-tau^2)||h_kk||^2 + tau^2 M
//   var_I = sum_j rho_j^2 Var[Y_jk]
// The variance treats the Y_jk as independent across j; the covariance
// induced by the shared estimation error is lower order in M.
inline UnitAsymptotics unit_asymptotics(const GroupChannel& group, int k,
                                        RateUnits units = RateUnits::nats) {
    const auto& cfg = group.cfg;
    const auto& device = group.devices[k];
    UnitAsymptotics out;
    out.device_id = device.id;
    const auto limit = desired_power_limit(device.z, cfg.L, cfg.M);
    out.p = limit.p;
    out.p_bar = limit.p_bar;
    out.norm_h_sq = group.norm_h_sq[k];

    double mean_acc = device.rho * cfg.tau_sq * out.norm_h_sq +
                      (1.0 - cfg.tau_sq) * out.norm_h_sq + cfg.tau_sq * cfg.M;
    double var_acc = 0;
    out.pairs.reserve(group.pairs_of[k].size());
    for (const auto& pair : group.pairs_of[k]) {
        const auto vectors = make_pair_vectors(group, k, pair);
        const auto mom = pair_moments(group, k, pair, vectors);
        const double rho_j = group.devices[group.member_index(pair.j)].rho;
        mean_acc += rho_j * mom.mean_y();
        var_acc += rho_j * rho_j * mom.var_y();
        out.pairs.push_back(mom);
    }
    out.mu_i = mean_acc;
    out.sigma2_i = var_acc;
    const auto lin = rate_linearization(device.rho, cfg.tau_sq, out.p_bar, out.mu_i, units);
    out.offset = lin.offset;
    out.slope = lin.slope;
    return out;
}

inline std::vector<UnitAsymptotics> group_asymptotics(const GroupChannel& group,
                                                      RateUnits units = RateUnits::nats) {
    std::vector<UnitAsymptotics> out;
    out.reserve(group.size());
    for (int k = 0; k < group.size(); ++k) out.push_back(unit_asymptotics(group, k, units));
    return out;
}

// mu_R = sum_k log(1 + g_k / mu_I_k); sigma2_R = sum_k slope_k^2 sigma2_I_k,
// equivalently sigma2_I g^2 / (mu_I^2 (mu_I + g)^2) per device.
inline SumRateDistribution sum_rate_distribution(const GroupChannel& group,
                                                 const std::vector<UnitAsymptotics>& units_asym,
                                                 RateUnits units = RateUnits::nats) {
    SumRateDistribution dist;
    const double scale = rate_unit_scale(units);
    dist.summands.reserve(units_asym.size());
    for (std::size_t k = 0; k < units_asym.size(); ++k) {
        const auto& ua = units_asym[k];
        const double g = group.devices[k].rho * ua.p_bar * (1.0 - group.cfg.tau_sq);
        const double term = scale * std::log1p(g / ua.mu_i);
        dist.summands.push_back(term);
        dist.mu += term;
        dist.sigma2 += ua.slope * ua.slope * ua.sigma2_i;
    }
    return dist;
}

// Gaussian tail Q(x) = P(N(0,1) > x) via the complementary error function.
inline double q_function(double x) noexcept {
    return 0.5 * std::erfc(x * 0.70710678118654752440);
}

// P(R < R_D) under R ~ N(mu, sigma^2); degenerate sigma = 0 falls back to
// the step function.
inline double outage_probability(double rate_threshold, double mu, double sigma) {
    if (!(sigma > 0)) return rate_threshold > mu ? 1.0 : 0.0;
    return 1.0 - q_function((rate_threshold - mu) / sigma);
}

// Threshold given as a fraction of the mean: R_D = delta * mu.
inline double outage_probability_delta(double delta, double mu, double sigma) {
    if (!(sigma > 0)) return delta * mu > mu ? 1.0 : 0.0;
    return q_function((1.0 - delta) * mu / sigma);
}

// ---------------------------------------------------------------------------
// CLT condition diagnostic: the fourth-moment ratio
//   sum_k E[(b_k sum_j rho_j (Y_jk - E Y_jk))^4] / (sum_k b_k^2 var_I_k)^2
// must decay (as 1/K) for the Gaussian sum-rate law to hold.

struct LyapunovDiagnostic {
    double s_sq = 0;       // sum_k slope_k^2 sigma2_I_k
    double numerator = 0;  // sum_k slope_k^4 E[(T_k - E T_k)^4]
    double ratio = 0;
};

// fourth_moments[k] is a Monte Carlo estimate of E[(T_k - E T_k)^4] where
// T_k = sum_j rho_j Y_jk.
inline LyapunovDiagnostic lyapunov_diagnostic(const std::vector<UnitAsymptotics>& units_asym,
                                              const std::vector<double>& fourth_moments) {
    if (units_asym.size() < 2)
        throw std::domain_error("lyapunov_diagnostic: needs at least two devices");
    if (fourth_moments.size() != units_asym.size())
        throw std::invalid_argument("lyapunov_diagnostic: dimension mismatch");
    LyapunovDiagnostic diag;
    for (std::size_t k = 0; k < units_asym.size(); ++k) {
        const double b = units_asym[k].slope;
        diag.s_sq += b * b * units_asym[k].sigma2_i;
        diag.numerator += b * b * b * b * fourth_moments[k];
    }
    if (!(diag.s_sq > 0)) throw std::domain_error("lyapunov_diagnostic: zero variance");
    diag.ratio = diag.numerator / (diag.s_sq * diag.s_sq);
    return diag;
}

// ---------------------------------------------------------------------------
// Scaling report over a sweep of scenarios.

struct ScalingPoint {
    std::string label;
    double axis = 0;   // swept quantity (M or K)
    double mu = 0, sigma = 0;
    double outage = 0; // at the sweep's delta

    double mean_to_dev() const noexcept {
        return sigma > 0 ? mu / sigma : std::numeric_limits<double>::infinity();
    }
};

struct ScalingReport {
    std::vector<ScalingPoint> points;
    bool ratio_increasing = true;   // mu/sigma grows along the sweep
    bool outage_non_increasing = true;
};

inline ScalingReport scaling_check(std::vector<ScalingPoint> points) {
    ScalingReport report;
    report.points = std::move(points);
    for (std::size_t i = 1; i < report.points.size(); ++i) {
        if (!(report.points[i].mean_to_dev() > report.points[i - 1].mean_to_dev()))
            report.ratio_increasing = false;
        if (report.points[i].outage > report.points[i - 1].outage)
            report.outage_non_increasing = false;
    }
    return report;
}

}  // namespace lisim

#endif  // LISIM_ASYMPTOTICS_HPP
