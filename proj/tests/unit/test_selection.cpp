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
#include "bdris/selection.hpp"
#include "support/instance.hpp"
#include "support/oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace bdris;
using testing::InstanceSpec;
using testing::random_iterate;
using testing::random_network;

namespace {

rmat random_reward(Rng& rng, int m)
{
    std::normal_distribution<double> nd;
    rmat w(m, m);
    for (auto& x : w.reshaped())
        x = nd(rng);
    return w;
}

double score(const rmat& w, const rmat& s) { return (w.array() * s.array()).sum(); }

void check_against_differences(const Network& net, const Iterate& it, double tol)
{
    const LinkState st(net, it);
    const int M = net.dims().num_elements;
    for (int q = 0; q < net.dims().num_cells; ++q) {
        const auto g = selection_gradient(net, st, it, q);
        rmat own(M, M), other(M, M);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j) {
                auto bump = [&](double h) {
                    Iterate p = it;
                    p.selections[static_cast<std::size_t>(q)](i, j) += h;
                    return p;
                };
                own(i, j) = oracle::central_difference([&](double h) { return oracle::own_rate_sum(net, bump(h), q); }, 1e-6);
                other(i, j) = oracle::central_difference([&](double h) { return oracle::other_rate_sum(net, bump(h), q); }, 1e-6);
            }
        CHECK((rmat(g.own.real()) - own).norm() <= tol * own.norm());
        CHECK((rmat(g.pricing.real()) - other).norm() <= tol * other.norm());
        CHECK(gradient_S_own(net, st, it, q) == g.own);
        CHECK(pricing_S(net, st, it, q) == g.pricing);
    }
}

} // namespace

TEST_CASE("switch gradients match finite differences of the relaxed selection", "[selection]")
{
    for (int users : {1, 2})
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            InstanceSpec s;
            s.users_per_cell = users;
            const Network net = random_network(seed, s);
            check_against_differences(net, random_iterate(net, seed), 1e-4);
        }
}

TEST_CASE("directional derivative of the own rate", "[selection]")
{
    const Network net = random_network(21);
    const Iterate it = random_iterate(net, 21);
    const LinkState st(net, it);
    Rng rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        const rmat dir = random_reward(rng, 4);
        const double fd = oracle::central_difference(
            [&](double h) {
                Iterate p = it;
                p.selections[0] += h * dir;
                return oracle::own_rate_sum(net, p, 0);
            },
            1e-6);
        CHECK(score(gradient_S_own(net, st, it, 0).real(), dir) == Catch::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("switch gradient edge cases", "[selection]")
{
    SECTION("zero precoders")
    {
        const Network net = random_network(1);
        Iterate it = random_iterate(net, 1);
        for (auto& u : it.precoders)
            for (auto& w : u)
                w.setZero();
        const LinkState st(net, it);
        const auto g = selection_gradient(net, st, it, 1);
        CHECK(g.own.norm() == 0.0);
        CHECK(g.pricing.norm() == 0.0);
    }
    SECTION("single cell has no pricing")
    {
        InstanceSpec s;
        s.cells = 1;
        const Network net = random_network(2, s);
        const Iterate it = random_iterate(net, 2);
        const LinkState st(net, it);
        CHECK(pricing_S(net, st, it, 0).norm() == 0.0);
    }
    SECTION("stronger cross links still give the matching gradient")
    {
        Network net = random_network(3);
        const Iterate it = random_iterate(net, 3);
        const LinkState before(net, it);
        const cmat pi_before = pricing_S(net, before, it, 0);
        for (int k = 0; k < 4; ++k)
            net.channels.ris_ue(0, 1, k) *= 2.0;
        const LinkState after(net, it);
        CHECK((pricing_S(net, after, it, 0) - pi_before).norm() > 0.0);
        check_against_differences(net, it, 1e-4);
    }
}

TEST_CASE("assignment solve", "[selection]")
{
    Rng rng(11);
    SECTION("identity-dominant reward keeps the identity")
    {
        rmat w = random_reward(rng, 5).cwiseAbs();
        w.diagonal().array() += 100.0;
        CHECK(solve_selection(w) == rmat::Identity(5, 5));
    }
    SECTION("matches enumeration up to M = 6")
    {
        for (int trial = 0; trial < 100; ++trial) {
            const int m = 1 + trial % 6;
            const rmat w = random_reward(rng, m);
            const rmat s = solve_selection(w);
            REQUIRE(is_permutation_matrix(s));
            CHECK(score(w, s) == Catch::Approx(oracle::best_assignment(w)).epsilon(1e-12));
            CHECK((s * s.transpose()).trace() == m);
        }
    }
    SECTION("constant shift does not change the argmax")
    {
        for (int trial = 0; trial < 20; ++trial) {
            const rmat w = random_reward(rng, 3);
            CHECK(solve_selection(w) == solve_selection((w.array() + 7.5).matrix()));
        }
    }
    SECTION("larger instances return permutations")
    {
        const rmat w = random_reward(rng, 100);
        const rmat s = solve_selection(w);
        CHECK(is_permutation_matrix(s));
        CHECK(score(w, s) >= score(w, rmat::Identity(100, 100)));
    }
    SECTION("invalid rewards")
    {
        CHECK_THROWS_AS(solve_selection(rmat::Zero(2, 3)), PreconditionViolation);
        rmat w = rmat::Zero(2, 2);
        w(0, 1) = std::nan("");
        CHECK_THROWS_AS(solve_selection(w), PreconditionViolation);
    }
}

TEST_CASE("selection gain checks", "[selection]")
{
    Rng rng(12);
    SECTION("linearized gain of the optimum is never beaten")
    {
        for (int m = 2; m <= 4; ++m)
            for (int trial = 0; trial < 10; ++trial) {
                const rmat w = random_reward(rng, m);
                const rmat s_opt = solve_selection(w);
                for (const auto& s_old : oracle::all_permutation_matrices(m)) {
                    CHECK(linearized_selection_gain(w, s_opt, s_old) >= -1e-12);
                    CHECK(linearized_selection_gain(w, s_old, s_opt) <= 1e-12);
                }
            }
    }
    SECTION("exact gain check")
    {
        const Network net = random_network(13);
        const Iterate it = random_iterate(net, 13);
        const LinkState st(net, it);
        const auto g = selection_gradient(net, st, it, 0);
        const rmat& s_old = it.selections[0];
        CHECK(objective_gain_check(net, it, 0, s_old, s_old, g.pricing, 0.8) == 0.0);
        for (const auto& s_new : oracle::all_permutation_matrices(4)) {
            Iterate p = it;
            p.selections[0] = s_new;
            const rmat ds = s_new - s_old;
            const double expect = oracle::own_rate_sum(net, p, 0) - oracle::own_rate_sum(net, it, 0)
                + score(g.pricing.real(), ds) - 0.4 * ds.squaredNorm();
            CHECK(objective_gain_check(net, it, 0, s_new, s_old, g.pricing, 0.8) == Catch::Approx(expect).margin(1e-10));
        }
    }
}

TEST_CASE("hungarian assignment on costs", "[selection]")
{
    rmat c(3, 3);
    c << 4, 1, 3, 2, 0, 5, 3, 2, 2;
    const auto p = hungarian_min_cost(c);
    CHECK(p == std::vector<int>{1, 0, 2});
    CHECK(permutation_matrix(p) == (rmat(3, 3) << 0, 1, 0, 1, 0, 0, 0, 0, 1).finished());
}
