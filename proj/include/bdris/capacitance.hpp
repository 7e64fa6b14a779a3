// SPDX-License-Identifier: Apache-2.0
//
// bdris: distributed sum-rate optimization for BD-RIS interference broadcast channels
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

#ifndef BDRIS_CAPACITANCE_HPP
#define BDRIS_CAPACITANCE_HPP

#include "circuit.hpp"
#include "error.hpp"
#include "rates.hpp"
#include "types.hpp"

#include <algorithm>
#include <cmath>

namespace bdris {

// Gradient of per-cell rate sums (sum over k, no 1/K) with respect to the capacitances of
// one RIS, in bits per farad.
struct CapacitanceGradient {
    rvec own;     // gamma: d/dc_q of the own-cell rate sum
    rvec pricing; // pi: d/dc_q of the other cells' rate sums
    rvec total() const { return own + pricing; }
};

namespace detail {

// vec_d of the per-element gradient matrix
//     A + C Phi^H B,  A = H w_a w_a^H h_r g_r^H S,  C = H w_c w_c^H H^H,  B = S^T g_r g_r^H S
// for a transmit precoder pair (w_a, w_c) and a receiving user r. Every factor is rank one,
// so the diagonal is assembled from the vectors without forming M x M products.
inline cvec element_gradient_diagonal(const cmat& bs_ris, const rmat& sel, const cvec& phi, const cvec& h_r,
                                      const cvec& g_r, const cvec& w_a, const cvec& w_c)
{
    const cvec va = bs_ris * w_a;                      // H w_a
    const cvec vc = bs_ris * w_c;                      // H w_c
    const cvec u = sel.transpose().cast<cd>() * g_r;   // S^T g_r, so g_r^H S = u^H
    const cd wa_h = w_a.dot(h_r);                      // w_a^H h_r
    const cd vc_phi_u = vc.dot(phi.conjugate().cwiseProduct(u)); // w_c^H H^H Phi^H S^T g_r
    // diag(A)_i = va_i (w_a^H h_r) conj(u_i); diag(C Phi^H B)_i = vc_i (vc^H Phi^H u) conj(u_i)
    return (va * wa_h + vc * vc_phi_u).cwiseProduct(u.conjugate());
}

} // namespace detail

// gamma_{c_q} and pi_{c_q} at the iterate described by `st`/`it`: for each term
// 2 Re{Q_{q,k} vec_d(M)} = d|f^H w|^2 / dC. `dphi[k]` is the diagonal of Q_{q,k}. For the
// identity above to hold it must be d phi / dC, not d conj(phi) / dC (checked against
// finite differences of the rate sums). With include_pricing = false the other-cell part
// is left at zero.
inline CapacitanceGradient capacitance_gradient(const Network& net, const LinkState& st, const Iterate& it, int q,
                                                const PhaseProfile& dphi, bool include_pricing = true)
{
    const Dimensions& d = net.dims();
    const int K = d.num_subcarriers;
    const rmat& sel = it.selections[static_cast<std::size_t>(q)];
    CapacitanceGradient g{rvec::Zero(d.num_elements), rvec::Zero(d.num_elements)};
    const int first = d.first_user(q);
    const int count = d.users_in(q);

    for (int k = 0; k < K; ++k) {
        const cmat& H = net.channels.bs_ris(q, k);
        const cvec& phi = st.phase(q, k);
        const cvec& dq = dphi[static_cast<std::size_t>(k)];

        for (int l = first; l < first + count; ++l) {
            const cvec& h = net.channels.direct(q, l, k);
            const cvec& gl = net.channels.ris_ue(q, l, k);
            const double mui = st.mui(l, k);
            const double s2 = st.signal_power(l, k);
            const double coef = (2.0 / kLn2) / ((1.0 + s2 / mui) * mui * mui);

            const cvec m_own = detail::element_gradient_diagonal(H, sel, phi, h, gl, it.w(l, k), it.w(l, k));
            rvec term = mui * dq.cwiseProduct(m_own).real();
            for (int m = first; m < first + count; ++m) {
                if (m == l)
                    continue;
                const cvec m_intra = detail::element_gradient_diagonal(H, sel, phi, h, gl, it.w(m, k), it.w(m, k));
                term -= s2 * dq.cwiseProduct(m_intra).real();
            }
            g.own += coef * term;
        }

        if (!include_pricing)
            continue;
        for (int n = 0; n < d.num_users(); ++n) {
            if (d.cell_of(n) == q)
                continue;
            const double snr = st.snr(n, k);
            const double coef = -(2.0 / kLn2) * snr / ((1.0 + snr) * st.mui(n, k));
            if (coef == 0.0)
                continue;
            const cvec& h = net.channels.direct(q, n, k);
            const cvec& gn = net.channels.ris_ue(q, n, k);
            // Every precoder of BS q interferes with user n, so the cross term is summed over them.
            cvec diag = cvec::Zero(d.num_elements);
            for (int l = first; l < first + count; ++l)
                diag += detail::element_gradient_diagonal(H, sel, phi, h, gn, it.w(l, k), it.w(l, k));
            g.pricing += coef * dq.cwiseProduct(diag).real();
        }
    }
    return g;
}

inline CapacitanceGradient capacitance_gradient(const Network& net, const LinkState& st, const Iterate& it, int q,
                                                bool include_pricing = true)
{
    const auto dq = build_phase_derivatives(it.capacitances[static_cast<std::size_t>(q)], net.grid, net.circuit);
    return capacitance_gradient(net, st, it, q, dq, include_pricing);
}

inline rvec gradient_own(const Network& net, const LinkState& st, const Iterate& it, int q)
{
    return capacitance_gradient(net, st, it, q, false).own;
}

inline rvec pricing_c(const Network& net, const LinkState& st, const Iterate& it, int q)
{
    return capacitance_gradient(net, st, it, q, true).pricing;
}

// Maximizer of -tau/2 |c - c_t|^2 + (gamma + pi)^T (c - c_t) over the box [c_min, c_max]:
// each coordinate of beta / tau, beta = tau c_t + gamma + pi, clamped to the box.
inline rvec update_capacitances(const rvec& c_t, const rvec& gamma, const rvec& pricing, double tau, double c_min,
                                double c_max)
{
    if (!(tau > 0.0))
        throw PreconditionViolation("update_capacitances: tau must be > 0");
    const rvec beta = tau * c_t + gamma + pricing;
    rvec c(beta.size());
    for (Eigen::Index m = 0; m < beta.size(); ++m) {
        const double x = beta[m] / tau;
        c[m] = x < c_min ? c_min : (x > c_max ? c_max : x);
    }
    return c;
}

inline double capacitance_objective(const rvec& c, const rvec& c_t, const rvec& gamma, const rvec& pricing, double tau)
{
    const rvec dc = c - c_t;
    return -tau / 2.0 * dc.squaredNorm() + (gamma + pricing).dot(dc);
}

} // namespace bdris

#endif
