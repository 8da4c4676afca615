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

#ifndef LISIM_RATE_HPP
#define LISIM_RATE_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lisim/channel.hpp"

namespace lisim {

// One Monte Carlo realization's quadratic terms for a single receiver k:
//   S = ||h_kk||^4
//   X = |e^H h_kk|^2
//   Y_j = |sqrt(1-tau^2) h_kk^H h_jk + tau e^H h_jk|^2
//   Z = ||sqrt(1-tau^2) h_kk + tau e||^2
//   I = rho_k tau^2 X + sum_j rho_j Y_j + Z
struct RealizationTerms {
    double S = 0;
    double X = 0;
    std::vector<double> Y;  // one per interferer, ordered like the inputs
    double Z = 0;
};

inline cxd hermitian_dot(const std::vector<cxd>& a, const std::vector<cxd>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("hermitian_dot: dimension mismatch");
    cxd acc{};
    for (std::size_t m = 0; m < a.size(); ++m) acc += std::conj(a[m]) * b[m];
    return acc;
}

// Exact Hermitian quadratic forms; no asymptotic approximation anywhere.
inline RealizationTerms quadratic_terms(const std::vector<cxd>& h_kk,
                                        const std::vector<std::vector<cxd>>& h_jk,
                                        const std::vector<cxd>& e, double tau_sq) {
    const std::size_t m_count = h_kk.size();
    if (e.size() != m_count) throw std::invalid_argument("quadratic_terms: dimension mismatch");
    const double tau = std::sqrt(tau_sq);
    const double sq1mt = std::sqrt(1.0 - tau_sq);

    RealizationTerms terms;
    const double hh = norm_sq(h_kk);
    terms.S = hh * hh;
    terms.X = std::norm(hermitian_dot(e, h_kk));

    double z_acc = 0;
    for (std::size_t m = 0; m < m_count; ++m) z_acc += std::norm(sq1mt * h_kk[m] + tau * e[m]);
    terms.Z = z_acc;

    terms.Y.reserve(h_jk.size());
    for (const auto& h : h_jk) {
        if (h.size() != m_count)
            throw std::invalid_argument("quadratic_terms: dimension mismatch");
        terms.Y.push_back(std::norm(sq1mt * hermitian_dot(h_kk, h) + tau * hermitian_dot(e, h)));
    }
    return terms;
}

inline double interference_power(const RealizationTerms& terms, double rho_k,
                                 const std::vector<double>& rho_j, double tau_sq) {
    if (rho_j.size() != terms.Y.size())
        throw std::invalid_argument("interference_power: dimension mismatch");
    double acc = rho_k * tau_sq * terms.X + terms.Z;
    for (std::size_t j = 0; j < terms.Y.size(); ++j) acc += rho_j[j] * terms.Y[j];
    return acc;
}

// gamma_k = rho_k S_k (1 - tau^2) / I_k. I_k > 0 holds almost surely
// (Z_k > 0 whenever M >= 1); a zero denominator is a caller bug.
inline double sinr(const RealizationTerms& terms, double rho_k,
                   const std::vector<double>& rho_j, double tau_sq) {
    const double denom = interference_power(terms, rho_k, rho_j, tau_sq);
    if (!(denom > 0)) throw std::domain_error("sinr: non-positive interference power");
    return rho_k * terms.S * (1.0 - tau_sq) / denom;
}

inline double instantaneous_rate(double gamma, RateUnits units = RateUnits::nats) {
    return std::log1p(gamma) * rate_unit_scale(units);
}

inline double sum_rate(const std::vector<double>& gammas, RateUnits units = RateUnits::nats) {
    double acc = 0;
    for (double g : gammas) acc += instantaneous_rate(g, units);
    return acc;
}

}  // namespace lisim

#endif  // LISIM_RATE_HPP
