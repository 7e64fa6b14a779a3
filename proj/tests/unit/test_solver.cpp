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
#include "bdris/solver.hpp"
#include "support/instance.hpp"
#include "support/oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace bdris;
using testing::InstanceSpec;
using testing::random_iterate;
using testing::random_network;

namespace {

SolverConfig variant(RisMode mode, bool cooperative)
{
    SolverConfig c;
    c.ris_mode = mode;
    c.cooperative = cooperative;
    return c;
}

// Water-filling over subcarriers for one user with channel gains g_k = |h_k|^2 / sigma^2.
double water_filling_rate(const std::vector<double>& gains, double budget)
{
    double lo = 0.0, hi = budget + 1.0 / *std::min_element(gains.begin(), gains.end());
    for (int i = 0; i < 300; ++i) {
        const double mu = 0.5 * (lo + hi);
        double p = 0.0;
        for (double g : gains)
            p += std::max(0.0, mu - 1.0 / g);
        (p > budget ? hi : lo) = mu;
    }
    double r = 0.0;
    for (double g : gains)
        r += std::log2(1.0 + g * std::max(0.0, lo - 1.0 / g));
    return r / static_cast<double>(gains.size());
}

} // namespace

TEST_CASE("solver configuration", "[solver]")
{
    SolverConfig c;
    CHECK(c.tau == 0.8);
    CHECK(c.alpha0 == 1.0);
    CHECK(c.epsilon == 0.01);
    CHECK(c.max_iterations == 500);
    CHECK(c.tolerance == 1e-4);
    CHECK(c.stall_iterations == 10);
    CHECK_NOTHROW(c.validate());
    auto bad = [](auto mutate) {
        SolverConfig s;
        mutate(s);
        return s;
    };
    CHECK_THROWS_AS(bad([](SolverConfig& s) { s.tau = 0.0; }).validate(), PreconditionViolation);
    CHECK_THROWS_AS(bad([](SolverConfig& s) { s.alpha0 = 0.0; }).validate(), PreconditionViolation);
    CHECK_THROWS_AS(bad([](SolverConfig& s) { s.alpha0 = 1.5; }).validate(), PreconditionViolation);
    CHECK_THROWS_AS(bad([](SolverConfig& s) { s.epsilon = 1.0; }).validate(), PreconditionViolation);
    CHECK_THROWS_AS(bad([](SolverConfig& s) { s.stall_iterations = 0; }).validate(), PreconditionViolation);
    CHECK(to_string(RisMode::beyond_diagonal) == "bd_ris");
    CHECK(to_string(RisMode::diagonal) == "diag_ris");
    CHECK(to_string(RisMode::none) == "no_ris");
}

TEST_CASE("step-size schedule", "[solver]")
{
    SolverConfig c;
    CHECK(step_size_schedule(0, 0.123, c) == c.alpha0);
    double a = step_size_schedule(0, 0.0, c);
    for (int t = 1; t <= 100000; ++t) {
        const double next = step_size_schedule(t, a, c);
        REQUIRE(next > 0.0);
        REQUIRE(next < a);
        a = next;
    }
    c.epsilon = 0.0;
    CHECK(step_size_schedule(5, 0.7, c) == 0.7);
}

TEST_CASE("initial iterate", "[solver]")
{
    InstanceSpec s;
    s.users_per_cell = 2;
    const Network net = random_network(1, s);
    const Iterate it = initial_iterate(net);
    CHECK(feasibility_violation(net, it).empty());
    const Dimensions& d = net.dims();
    for (int q = 0; q < d.num_cells; ++q) {
        CHECK(it.transmit_power(d, q) == Catch::Approx(net.power_budget[static_cast<std::size_t>(q)]).epsilon(1e-14));
        CHECK(it.selections[static_cast<std::size_t>(q)] == rmat::Identity(d.num_elements, d.num_elements));
        CHECK((it.capacitances[static_cast<std::size_t>(q)].array() == 0.5 * (net.circuit.c_min + net.circuit.c_max)).all());
        for (int l = 0; l < d.users_in(q); ++l) {
            const int u = d.first_user(q) + l;
            for (int k = 0; k < d.num_subcarriers; ++k) {
                const cvec& h = net.channels.direct(q, u, k);
                CHECK(std::abs(std::abs(h.dot(it.w(u, k))) - h.norm() * it.w(u, k).norm()) <= 1e-12 * h.norm() * it.w(u, k).norm());
            }
        }
    }
}

TEST_CASE("local subproblem", "[solver]")
{
    const Network net = random_network(2);
    const Iterate it = random_iterate(net, 2, false);
    const LinkState st(net, it);

    SECTION("non-cooperative variant drops pricing")
    {
        const SolverConfig cfg = variant(RisMode::diagonal, false);
        const auto cand = local_subproblem(net, it, st, 0, cfg);
        const auto ref = bisect_power_multiplier({build_precoder_surrogate(st, it, 0, {false, true})}, cfg.tau,
                                                 net.power_budget[0], cfg.bisection);
        for (int k = 0; k < 4; ++k)
            CHECK((cand.precoders[0][static_cast<std::size_t>(k)] - ref.precoders[0][static_cast<std::size_t>(k)]).norm() == 0.0);
        const auto g = capacitance_gradient(net, st, it, 0, false);
        const double unit = cfg.capacitance_unit;
        const rvec expect = update_capacitances(it.capacitances[0] / unit, g.own * unit, rvec::Zero(4), cfg.tau,
                                                net.circuit.c_min / unit, net.circuit.c_max / unit) * unit;
        CHECK((cand.capacitances - expect).norm() <= 1e-15 * expect.norm());
    }
    SECTION("diagonal RIS never changes the selection")
    {
        const auto cand = local_subproblem(net, it, st, 1, variant(RisMode::diagonal, true));
        CHECK(cand.selection == it.selections[1]);
        CHECK(cand.selection_gain == 0.0);
    }
    SECTION("no RIS keeps capacitances")
    {
        const LinkState off(net, it, false);
        const auto cand = local_subproblem(net, it, off, 1, variant(RisMode::none, true));
        CHECK(cand.capacitances == it.capacitances[1]);
    }
    SECTION("proximal fixed point at a stationary iterate")
    {
        Iterate zero = it;
        for (auto& u : zero.precoders)
            for (auto& w : u)
                w.setZero();
        const LinkState zs(net, zero);
        for (int q = 0; q < 2; ++q) {
            const auto cand = local_subproblem(net, zero, zs, q, SolverConfig{});
            for (const auto& u : cand.precoders)
                for (const auto& w : u)
                    CHECK(w.norm() == 0.0);
            CHECK((cand.capacitances - zero.capacitances[static_cast<std::size_t>(q)]).norm() <= 1e-15 * zero.capacitances[static_cast<std::size_t>(q)].norm());
            CHECK(cand.selection == zero.selections[static_cast<std::size_t>(q)]);
        }
    }
}

TEST_CASE("update step", "[solver]")
{
    const Network net = random_network(3);
    const Iterate it = random_iterate(net, 3);
    const LinkState st(net, it);
    std::vector<LocalCandidate> cands;
    for (int q = 0; q < 2; ++q)
        cands.push_back(local_subproblem(net, it, st, q, SolverConfig{}));

    SECTION("alpha = 1 takes the candidates")
    {
        const Iterate next = step(net, it, cands, 1.0);
        for (int q = 0; q < 2; ++q) {
            const auto& cand = cands[static_cast<std::size_t>(q)];
            CHECK((next.capacitances[static_cast<std::size_t>(q)] - cand.capacitances).norm() <= 1e-15 * cand.capacitances.norm());
            for (int k = 0; k < 4; ++k) {
                const cvec& w_hat = cand.precoders[0][static_cast<std::size_t>(k)];
                CHECK((next.w(q, k) - w_hat).norm() <= 1e-15 * w_hat.norm());
            }
        }
    }
    SECTION("alpha = 0 keeps the iterate")
    {
        const Iterate next = step(net, it, cands, 0.0);
        CHECK(next.capacitances == it.capacitances);
        CHECK(next.selections == it.selections);
        CHECK(next.precoders == it.precoders);
    }
    SECTION("blends stay feasible")
    {
        for (int i = 0; i <= 20; ++i)
            CHECK(feasibility_violation(net, step(net, it, cands, i / 20.0)).empty());
    }
    SECTION("invalid alpha or infeasible result")
    {
        CHECK_THROWS_AS(step(net, it, cands, 1.5), PreconditionViolation);
        auto bad = cands;
        bad[0].precoders[0][0] *= 100.0;
        CHECK_THROWS_AS(step(net, it, bad, 1.0), NumericalFailure);
    }
}

TEST_CASE("full runs", "[solver]")
{
    SECTION("single user without RIS reaches the water-filling rate")
    {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            InstanceSpec s;
            s.cells = 1;
            s.antennas = 2;
            s.subcarriers = 4;
            s.noise = 0.5;
            s.power = 2.0;
            const Network net = random_network(seed, s);
            SolverConfig cfg = variant(RisMode::none, true);
            cfg.tolerance = 1e-12;
            cfg.max_iterations = 3000;
            const RunResult r = run(net, cfg);
            std::vector<double> gains;
            for (int k = 0; k < s.subcarriers; ++k)
                gains.push_back(net.channels.direct(0, 0, k).squaredNorm() / s.noise);
            CHECK(r.best_sum_rate == Catch::Approx(water_filling_rate(gains, s.power)).epsilon(1e-5));
        }
    }
    SECTION("traces, feasibility and best-so-far")
    {
        for (std::uint64_t seed = 0; seed < 5; ++seed)
            for (const auto& cfg : {variant(RisMode::beyond_diagonal, true), variant(RisMode::diagonal, false),
                                    variant(RisMode::none, true)}) {
                InstanceSpec s;
                s.users_per_cell = 1 + static_cast<int>(seed % 2);
                const Network net = random_network(seed, s);
                int observed = 0;
                const RunResult r = run(net, cfg, std::nullopt, [&](int t, const Iterate& x) {
                    CHECK(t == observed++);
                    CHECK(feasibility_violation(net, x).empty());
                    if (cfg.ris_mode != RisMode::beyond_diagonal)
                        for (const auto& sel : x.selections)
                            CHECK(sel == rmat::Identity(4, 4));
                });
                CHECK(observed == r.iterations + 1);
                CHECK(static_cast<int>(r.trace.rows.size()) == r.iterations);
                CHECK(r.best_sum_rate >= r.trace.initial_sum_rate);
                CHECK(r.best_sum_rate == Catch::Approx(sum_rate(net, r.best, cfg.ris_active())).epsilon(1e-14));
                double prev = r.trace.initial_sum_rate;
                for (const auto& row : r.trace.rows) {
                    CHECK(row.sum_rate >= prev - 1e-6);
                    prev = row.sum_rate;
                }
                if (cfg.ris_mode == RisMode::none)
                    CHECK(r.best.capacitances == initial_iterate(net).capacitances);
            }
    }
    SECTION("identical inputs give identical traces")
    {
        const Network net = random_network(9);
        std::ostringstream a, b;
        run(net, SolverConfig{}).trace.write_csv(a);
        run(net, SolverConfig{}).trace.write_csv(b);
        CHECK(a.str() == b.str());
        CHECK(a.str().rfind("iteration,sum_rate,alpha,power_slack_bs0,power_slack_bs1\n", 0) == 0);
    }
    SECTION("holding the selection keeps S fixed")
    {
        const Network net = random_network(10);
        SolverConfig cfg;
        cfg.hold_selection_iterations = 1000;
        const RunResult r = run(net, cfg);
        for (const auto& sel : r.last.selections)
            CHECK(sel == rmat::Identity(4, 4));
    }
}

TEST_CASE("stopping rule", "[solver]")
{
    const Network net = random_network(77);
    SolverConfig cfg;
    cfg.backtracking = false;
    cfg.max_iterations = 200;

    SECTION("a loose tolerance stops after exactly the stall window")
    {
        cfg.tolerance = 1e9;
        for (int window : {1, 4, 10}) {
            cfg.stall_iterations = window;
            const RunResult r = run(net, cfg);
            CHECK(r.converged);
            CHECK(r.iterations == window);
        }
    }
    SECTION("a zero tolerance runs to the iteration cap")
    {
        cfg.tolerance = 0.0;
        cfg.max_iterations = 30;
        const RunResult r = run(net, cfg);
        CHECK_FALSE(r.converged);
        CHECK(r.iterations == 30);
    }
    SECTION("stopping needs consecutive small changes")
    {
        cfg.backtracking = true;
        cfg.tolerance = 1e-4;
        cfg.stall_iterations = 5;
        cfg.max_iterations = 2000;
        const RunResult r = run(net, cfg);
        REQUIRE(r.converged);
        double prev = r.trace.initial_sum_rate;
        int run_length = 0;
        for (const auto& row : r.trace.rows) {
            run_length = std::abs(row.sum_rate - prev) <= cfg.tolerance ? run_length + 1 : 0;
            prev = row.sum_rate;
            if (row.iteration < r.iterations)
                CHECK(run_length < cfg.stall_iterations);
        }
        CHECK(run_length == cfg.stall_iterations);
    }
}
