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

#ifndef BDRIS_SELECTION_HPP
#define BDRIS_SELECTION_HPP

// Switch selection subproblem of one BD-RIS. The linearized objective over permutation
// matrices, trace(W^T S) with W = Re{Gamma + Pi + tau S^t}, is a linear assignment problem;
// its LP relaxation over doubly stochastic matrices has permutation vertices, so solving
// the assignment is exact.

#include "error.hpp"
#include "rates.hpp"
#include "types.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace bdris {

// Gradient of per-cell rate sums (sum over k, no 1/K) with respect to S_q treated as a
// real M x M matrix: d/dS_ab = Re{gradient(a, b)}.
struct SelectionGradient {
    cmat own;     // Gamma
    cmat pricing; // Pi

    rmat reward(const rmat& s_t, double tau) const { return (own + pricing).real() + tau * s_t; }
};

namespace detail {

// N = F + K S^T G for precoder w and receiving user r, with
//   F = Phi H w w^H h_r g_r^H,  K = Phi H w w^H H^H Phi^H,  G = g_r g_r^H.
// Both terms are (Phi H w) times a row vector proportional to g_r^H.
inline cmat switch_gradient_matrix(const cmat& bs_ris, const rmat& sel, const cvec& phi, const cvec& h_r, const cvec& g_r,
                                   const cvec& w)
{
    const cvec y = phi.cwiseProduct(bs_ris * w);                // Phi H w
    const cd w_h = w.dot(h_r);                                    // w^H h_r
    const cd k_term = y.dot(sel.transpose().cast<cd>() * g_r);    // w^H H^H Phi^H S^T g_r
    return (w_h + k_term) * (y * g_r.adjoint());
}

} // namespace detail

inline SelectionGradient selection_gradient(const Network& net, const LinkState& st, const Iterate& it, int q,
                                            bool include_pricing = true)
{
    const Dimensions& d = net.dims();
    const int M = d.num_elements;
    const rmat& sel = it.selections[static_cast<std::size_t>(q)];
    SelectionGradient g{cmat::Zero(M, M), cmat::Zero(M, M)};
    const int first = d.first_user(q);
    const int count = d.users_in(q);

    for (int k = 0; k < d.num_subcarriers; ++k) {
        const cmat& H = net.channels.bs_ris(q, k);
        const cvec& phi = st.phase(q, k);

        for (int l = first; l < first + count; ++l) {
            const cvec& h = net.channels.direct(q, l, k);
            const cvec& gl = net.channels.ris_ue(q, l, k);
            const double mui = st.mui(l, k);
            const double s2 = st.signal_power(l, k);
            const double coef = (2.0 / kLn2) / ((1.0 + s2 / mui) * mui * mui);
            cmat term = mui * detail::switch_gradient_matrix(H, sel, phi, h, gl, it.w(l, k));
            for (int m = first; m < first + count; ++m)
                if (m != l)
                    term -= s2 * detail::switch_gradient_matrix(H, sel, phi, h, gl, it.w(m, k));
            g.own += coef * term.transpose();
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
            for (int l = first; l < first + count; ++l)
                g.pricing += coef * detail::switch_gradient_matrix(H, sel, phi, h, gn, it.w(l, k)).transpose();
        }
    }
    return g;
}

inline cmat gradient_S_own(const Network& net, const LinkState& st, const Iterate& it, int q)
{
    return selection_gradient(net, st, it, q, false).own;
}

inline cmat pricing_S(const Network& net, const LinkState& st, const Iterate& it, int q)
{
    return selection_gradient(net, st, it, q, true).pricing;
}

// Kuhn-Munkres on a square cost matrix (minimization). Returns row -> column.
inline std::vector<int> hungarian_min_cost(const rmat& cost)
{
    const int n = static_cast<int>(cost.rows());
    if (cost.cols() != cost.rows())
        throw PreconditionViolation("hungarian_min_cost: cost matrix must be square");
    if (!cost.allFinite())
        throw PreconditionViolation("hungarian_min_cost: cost matrix must be finite");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0), v(static_cast<std::size_t>(n + 1), 0.0);
    std::vector<int> p(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
        std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = p[static_cast<std::size_t>(j0)];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)])
                    continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                // strict '<' keeps the lowest column index among ties
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j)
        if (p[static_cast<std::size_t>(j)] != 0)
            row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
    return row_to_col;
}

inline rmat permutation_matrix(const std::vector<int>& row_to_col)
{
    const auto n = static_cast<Eigen::Index>(row_to_col.size());
    rmat s = rmat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        s(i, row_to_col[static_cast<std::size_t>(i)]) = 1.0;
    return s;
}

// argmax over permutation matrices S of sum_ij W_ij S_ij.
inline rmat solve_selection(const rmat& reward)
{
    if (reward.rows() != reward.cols() || !reward.allFinite())
        throw PreconditionViolation("solve_selection: reward must be square and finite");
    // Shift so costs are non-negative; a constant shift does not change the argmax.
    const rmat cost = reward.maxCoeff() - reward.array();
    return permutation_matrix(hungarian_min_cost(cost));
}

inline double linearized_selection_gain(const rmat& reward, const rmat& s_new, const rmat& s_old)
{
    return (reward.array() * (s_new - s_old).array()).sum();
}

// Difference (new - old) of the local selection objective of BS q: the exact own-cell rate
// sum with S_q replaced and everything else held at the iterate, plus the linear pricing
// term and the proximal penalty. Guards the discrete switch update.
inline double objective_gain_check(const Network& net, const Iterate& it, int q, const rmat& s_new, const rmat& s_old,
                                   const cmat& pricing, double tau)
{
    if (s_new == s_old)
        return 0.0;
    auto local_value = [&](const rmat& s) {
        Iterate trial = it;
        trial.selections[static_cast<std::size_t>(q)] = s;
        const LinkState st(net, trial, true);
        const rmat ds = s - it.selections[static_cast<std::size_t>(q)];
        return st.cell_rate_sum(q) + (pricing.real().array() * ds.array()).sum() - tau / 2.0 * ds.squaredNorm();
    };
    return local_value(s_new) - local_value(s_old);
}

} // namespace bdris

#endif
