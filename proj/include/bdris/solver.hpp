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

#ifndef BDRIS_SOLVER_HPP
#define BDRIS_SOLVER_HPP

// Distributed successive convex approximation. Every iteration, each BS q solves its local
// subproblem against the same snapshot X^t (Jacobi): a proximal minorizer of its own-cell
// rates plus the linearized rates of the other cells (pricing). The candidates are then
// blended, X^{t+1} = X^t + alpha^t (Xhat - X^t), on the precoder and capacitance blocks.
// The selection block cannot be blended on the permutation set; the candidate switch
// pattern is taken when it improves the local selection objective, else S^t is kept.
// Optionally (SolverConfig::backtracking) an update that lowers the true sum rate is
// retried with a smaller step, which keeps the trace monotone.

#include "capacitance.hpp"
#include "error.hpp"
#include "precoding.hpp"
#include "rates.hpp"
#include "selection.hpp"
#include "types.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace bdris {

struct SolverConfig {
    double tau = 0.80;
    double alpha0 = 1.0;
    double epsilon = 1e-2;
    int max_iterations = 500;
    double tolerance = 1e-4;   // on |sum_rate^{t+1} - sum_rate^t|, bits/s/Hz
    // Stop only after this many consecutive changes within tolerance. Single small steps
    // occur just before a backtracked iteration while the rate is still climbing.
    int stall_iterations = 10;
    RisMode ris_mode = RisMode::beyond_diagonal;
    bool cooperative = true;   // false: every pricing term from other cells is zero
    bool intracell_pricing = true;
    // Capacitances enter the subproblem in units of this many farads. The proximal
    // weight tau then acts on pF-scale steps instead of farads.
    double capacitance_unit = 1e-12;
    int hold_selection_iterations = 0; // keep S^t fixed for the first T0 iterations
    // When an update lowers the true sum rate, retry it without switch changes and with
    // alpha halved, up to max_backtracks times; the accepted alpha seeds the schedule.
    bool backtracking = true;
    int max_backtracks = 30;
    BisectionOptions bisection;

    void validate() const
    {
        if (!(tau > 0.0))
            throw PreconditionViolation("SolverConfig: tau must be > 0");
        if (!(alpha0 > 0.0 && alpha0 <= 1.0))
            throw PreconditionViolation("SolverConfig: alpha0 must be in (0, 1]");
        if (!(epsilon >= 0.0 && epsilon < 1.0))
            throw PreconditionViolation("SolverConfig: epsilon must be in [0, 1)");
        if (max_iterations < 1)
            throw PreconditionViolation("SolverConfig: max_iterations must be >= 1");
        if (!(tolerance >= 0.0))
            throw PreconditionViolation("SolverConfig: tolerance must be >= 0");
        if (!(capacitance_unit > 0.0))
            throw PreconditionViolation("SolverConfig: capacitance_unit must be > 0");
        if (stall_iterations < 1)
            throw PreconditionViolation("SolverConfig: stall_iterations must be >= 1");
        if (max_backtracks < 0)
            throw PreconditionViolation("SolverConfig: max_backtracks must be >= 0");
    }

    bool ris_active() const { return ris_mode != RisMode::none; }
    bool optimize_selection() const { return ris_mode == RisMode::beyond_diagonal; }
};

inline std::string to_string(RisMode m)
{
    switch (m) {
    case RisMode::beyond_diagonal: return "bd_ris";
    case RisMode::diagonal: return "diag_ris";
    case RisMode::none: return "no_ris";
    }
    return "?";
}

// Matched filters on the direct channels with the budget split evenly over users and
// subcarriers; capacitances at the middle of the box; S = I.
inline Iterate initial_iterate(const Network& net)
{
    const Dimensions& d = net.dims();
    Iterate it;
    it.precoders.resize(static_cast<std::size_t>(d.num_users()));
    for (int q = 0; q < d.num_cells; ++q) {
        const double per_stream = net.power_budget[static_cast<std::size_t>(q)] / (d.users_in(q) * d.num_subcarriers);
        for (int l = 0; l < d.users_in(q); ++l) {
            const int u = d.first_user(q) + l;
            auto& w = it.precoders[static_cast<std::size_t>(u)];
            w.resize(static_cast<std::size_t>(d.num_subcarriers));
            for (int k = 0; k < d.num_subcarriers; ++k) {
                const cvec& h = net.channels.direct(q, u, k);
                const double nrm = h.norm();
                w[static_cast<std::size_t>(k)] = nrm > 0.0 ? cvec(h * (std::sqrt(per_stream) / nrm))
                                                           : cvec(cvec::Constant(d.num_antennas, std::sqrt(per_stream / d.num_antennas)));
            }
        }
    }
    const double mid = 0.5 * (net.circuit.c_min + net.circuit.c_max);
    it.capacitances.assign(static_cast<std::size_t>(d.num_cells), rvec::Constant(d.num_elements, mid));
    it.selections.assign(static_cast<std::size_t>(d.num_cells), rmat::Identity(d.num_elements, d.num_elements));
    return it;
}

struct LocalCandidate {
    int cell = 0;
    std::vector<std::vector<cvec>> precoders; // users of the cell, [l][k]
    rvec capacitances;
    rmat selection;
    double precoder_objective = 0.0; // surrogate value gained by the precoder block
    double selection_gain = 0.0;     // objective_gain_check of the selection candidate
    double lambda = 0.0;
};

// Best response of BS q to the snapshot `it` (with `st` its LinkState).
inline LocalCandidate local_subproblem(const Network& net, const Iterate& it, const LinkState& st, int q,
                                       const SolverConfig& cfg, int iteration = 0)
{
    const Dimensions& d = net.dims();
    LocalCandidate cand;
    cand.cell = q;

    std::vector<PrecoderSurrogate> users;
    users.reserve(static_cast<std::size_t>(d.users_in(q)));
    for (int l = 0; l < d.users_in(q); ++l)
        users.push_back(build_precoder_surrogate(st, it, d.first_user(q) + l,
                                                 PricingTerms{cfg.cooperative, cfg.intracell_pricing}));
    auto sol = bisect_power_multiplier(users, cfg.tau, net.power_budget[static_cast<std::size_t>(q)], cfg.bisection);
    cand.lambda = sol.lambda;
    for (std::size_t i = 0; i < users.size(); ++i)
        cand.precoder_objective += precoder_surrogate_objective(users[i], cfg.tau, sol.precoders[i])
            - precoder_surrogate_objective(users[i], cfg.tau, users[i].w_t);
    cand.precoders = std::move(sol.precoders);

    const rvec& c_t = it.capacitances[static_cast<std::size_t>(q)];
    const rmat& s_t = it.selections[static_cast<std::size_t>(q)];
    cand.capacitances = c_t;
    cand.selection = s_t;
    if (!cfg.ris_active())
        return cand;

    const auto cg = capacitance_gradient(net, st, it, q, cfg.cooperative);
    const double unit = cfg.capacitance_unit;
    const rvec c_scaled = update_capacitances(c_t / unit, cg.own * unit, cg.pricing * unit, cfg.tau,
                                              net.circuit.c_min / unit, net.circuit.c_max / unit);
    cand.capacitances = (c_scaled * unit).cwiseMax(net.circuit.c_min).cwiseMin(net.circuit.c_max);

    if (cfg.optimize_selection() && iteration >= cfg.hold_selection_iterations) {
        const auto sg = selection_gradient(net, st, it, q, cfg.cooperative);
        const rmat s_hat = solve_selection(sg.reward(s_t, cfg.tau));
        if (s_hat != s_t) {
            cand.selection_gain = objective_gain_check(net, it, q, s_hat, s_t, sg.pricing, cfg.tau);
            cand.selection = s_hat;
        }
    }
    return cand;
}

// X^{t+1} from X^t and the candidates of every BS.
inline Iterate step(const Network& net, const Iterate& it, const std::vector<LocalCandidate>& candidates, double alpha)
{
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw PreconditionViolation("step: alpha must be in [0, 1]");
    const Dimensions& d = net.dims();
    Iterate next = it;
    for (const auto& cand : candidates) {
        const int q = cand.cell;
        for (int l = 0; l < d.users_in(q); ++l) {
            const int u = d.first_user(q) + l;
            for (int k = 0; k < d.num_subcarriers; ++k) {
                const cvec& w_hat = cand.precoders[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
                next.w(u, k) = it.w(u, k) + alpha * (w_hat - it.w(u, k));
            }
        }
        const rvec& c_t = it.capacitances[static_cast<std::size_t>(q)];
        next.capacitances[static_cast<std::size_t>(q)] =
            (c_t + alpha * (cand.capacitances - c_t)).cwiseMax(net.circuit.c_min).cwiseMin(net.circuit.c_max);
        if (alpha > 0.0 && cand.selection_gain > 0.0)
            next.selections[static_cast<std::size_t>(q)] = cand.selection;
    }
    check_feasible(net, next);
    return next;
}

// alpha^0 = alpha0, alpha^{t+1} = alpha^t (1 - epsilon alpha^t).
inline double step_size_schedule(int t, double alpha_prev, const SolverConfig& cfg)
{
    if (t == 0)
        return cfg.alpha0;
    return alpha_prev * (1.0 - cfg.epsilon * alpha_prev);
}

struct TraceRow {
    int iteration = 0;
    double sum_rate = 0.0;
    double alpha = 0.0;
    std::vector<double> surrogate;   // per BS: precoder surrogate improvement of the candidate
    std::vector<double> power_slack; // per BS: P_q - transmit power after the update
    double wall_ms = 0.0;
};

struct Trace {
    double initial_sum_rate = 0.0;
    std::vector<TraceRow> rows; // one per executed iteration

    // CSV without timing columns, so that identical runs give identical bytes.
    void write_csv(std::ostream& os) const
    {
        os << "iteration,sum_rate,alpha";
        const std::size_t Q = rows.empty() ? 0 : rows.front().power_slack.size();
        for (std::size_t q = 0; q < Q; ++q)
            os << ",power_slack_bs" << q;
        os << '\n';
        char buf[64];
        auto put = [&](double x) {
            std::snprintf(buf, sizeof buf, "%.17g", x);
            os << buf;
        };
        os << 0 << ',';
        put(initial_sum_rate);
        os << ",0";
        for (std::size_t q = 0; q < Q; ++q)
            os << ",";
        os << '\n';
        for (const auto& r : rows) {
            os << r.iteration << ',';
            put(r.sum_rate);
            os << ',';
            put(r.alpha);
            for (double s : r.power_slack) {
                os << ',';
                put(s);
            }
            os << '\n';
        }
    }
};

struct RunResult {
    Iterate best;     // best iterate seen, by true sum rate
    double best_sum_rate = 0.0;
    Iterate last;
    Trace trace;
    int iterations = 0;
    bool converged = false;
};

// Called with (t, X^t) for the initial iterate (t = 0) and after every update.
using IterationObserver = std::function<void(int, const Iterate&)>;

inline RunResult run(const Network& net, const SolverConfig& cfg, std::optional<Iterate> start = std::nullopt,
                     const IterationObserver& observe = {})
{
    net.validate();
    cfg.validate();
    const Dimensions& d = net.dims();
    const bool ris = cfg.ris_active();

    Iterate it = start ? std::move(*start) : initial_iterate(net);
    check_feasible(net, it);
    if (observe)
        observe(0, it);

    RunResult res;
    LinkState st(net, it, ris);
    double current = st.sum_rate();
    res.trace.initial_sum_rate = current;
    res.best = it;
    res.best_sum_rate = current;

    double alpha = cfg.alpha0;
    double schedule_alpha = cfg.alpha0;
    int stalled = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int t = 0; t < cfg.max_iterations; ++t) {
        // After a full rejection (alpha = 0) the schedule resumes from its last positive value.
        if (alpha > 0.0)
            schedule_alpha = alpha;
        alpha = step_size_schedule(t, schedule_alpha, cfg);

        std::vector<LocalCandidate> cands;
        cands.reserve(static_cast<std::size_t>(d.num_cells));
        for (int q = 0; q < d.num_cells; ++q)
            cands.push_back(local_subproblem(net, it, st, q, cfg, t));

        Iterate next_it = step(net, it, cands, alpha);
        LinkState next_st(net, next_it, ris);
        double next = next_st.sum_rate();
        if (cfg.backtracking && next < current) {
            for (auto& c : cands)
                c.selection_gain = 0.0;
            double a = alpha;
            int tries = 0;
            for (; next < current && tries < cfg.max_backtracks; ++tries) {
                if (tries > 0)
                    a *= 0.5;
                next_it = step(net, it, cands, a);
                next_st = LinkState(net, next_it, ris);
                next = next_st.sum_rate();
            }
            if (next < current) {
                a = 0.0;
                next_it = it;
                next_st = st;
                next = current;
            }
            alpha = a;
        }
        it = std::move(next_it);
        st = std::move(next_st);
        if (observe)
            observe(t + 1, it);

        TraceRow row;
        row.iteration = t + 1;
        row.sum_rate = next;
        row.alpha = alpha;
        for (int q = 0; q < d.num_cells; ++q) {
            row.surrogate.push_back(cands[static_cast<std::size_t>(q)].precoder_objective);
            row.power_slack.push_back(net.power_budget[static_cast<std::size_t>(q)] - it.transmit_power(d, q));
        }
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        res.trace.rows.push_back(std::move(row));
        res.iterations = t + 1;

        if (next > res.best_sum_rate) {
            res.best_sum_rate = next;
            res.best = it;
        }
        stalled = std::abs(next - current) <= cfg.tolerance ? stalled + 1 : 0;
        current = next;
        if (alpha == 0.0 || stalled >= cfg.stall_iterations) {
            res.converged = true;
            break;
        }
    }
    res.last = std::move(it);
    return res;
}

} // namespace bdris

#endif
