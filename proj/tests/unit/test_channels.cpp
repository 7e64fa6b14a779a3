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
#include "bdris/channels.hpp"
#include "support/oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace bdris;

namespace {

NetworkTopology two_cell_topology(std::vector<int> users, int antennas = 2, int elements = 3, int subcarriers = 8)
{
    NetworkTopology t;
    t.dims.num_cells = 2;
    t.dims.num_antennas = antennas;
    t.dims.num_elements = elements;
    t.dims.num_subcarriers = subcarriers;
    t.dims.users_per_cell = users;
    t.bs = {{0, 0, 5}, {60, 0, 5}};
    t.ris = {{-2.5, 8.5, 3}, {62.5, 8.5, 3}};
    for (int u = 0; u < t.dims.num_users(); ++u)
        t.ue.push_back({30.0 + u, 60.0, 1.5});
    return t;
}

ChannelModel small_model(int taps)
{
    ChannelModel m;
    m.num_taps = taps;
    return m;
}

} // namespace

TEST_CASE("pathloss", "[channels]")
{
    const double lambda = kSpeedOfLight / 3.5e9;
    CHECK(pathloss(1.0, 3.7, lambda) == Catch::Approx(std::pow(lambda / (4 * std::numbers::pi), 2)).epsilon(1e-15));
    CHECK(lambda == Catch::Approx(0.08565).epsilon(1e-4));
    CHECK(pathloss(1.0, 2.0, lambda) == Catch::Approx(4.646e-5).epsilon(1e-3));
    CHECK(pathloss(20.0, 2.0, lambda) / pathloss(10.0, 2.0, lambda) == Catch::Approx(0.25).epsilon(1e-14));
    CHECK_THROWS_AS(pathloss(0.0, 2.0, lambda), PreconditionViolation);
}

TEST_CASE("exponential power-delay profile", "[channels]")
{
    const auto p = exponential_pdp(16, 4.0);
    REQUIRE(p.size() == 16);
    double s = 0.0;
    for (std::size_t t = 0; t < p.size(); ++t) {
        s += p[t];
        if (t > 0)
            CHECK(p[t] / p[t - 1] == Catch::Approx(std::exp(-0.25)).epsilon(1e-14));
    }
    CHECK(s == Catch::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("link taps", "[channels]")
{
    SECTION("single tap gives a flat response")
    {
        Rng rng(1);
        const auto taps = generate_link_taps(rng, 3, 2, 1, 1.0);
        const auto freq = taps_to_frequency(taps, 16);
        for (const auto& f : freq)
            CHECK((f - freq.front()).norm() == 0.0);
    }
    SECTION("summed tap power has mean total_gain")
    {
        Rng rng(2);
        const double gain = 3.7e-6;
        double acc = 0.0;
        const int draws = 10000;
        for (int i = 0; i < draws; ++i) {
            const auto taps = generate_link_taps(rng, 1, 1, 16, gain);
            for (const auto& t : taps)
                acc += std::norm(t(0, 0));
        }
        CHECK(acc / draws == Catch::Approx(gain).epsilon(0.03));
    }
    SECTION("same seed, same tensor; gain scales amplitudes")
    {
        Rng a(5), b(5), c(5);
        const auto ta = generate_link_taps(a, 4, 2, 6, 1.0);
        const auto tb = generate_link_taps(b, 4, 2, 6, 1.0);
        const auto tc = generate_link_taps(c, 4, 2, 6, 2.0);
        for (std::size_t t = 0; t < ta.size(); ++t) {
            CHECK(ta[t] == tb[t]);
            CHECK((tc[t].cwiseAbs2() - 2.0 * ta[t].cwiseAbs2()).norm() <= 1e-14 * ta[t].squaredNorm());
        }
    }
    SECTION("zero taps rejected")
    {
        Rng rng(1);
        CHECK_THROWS_AS(generate_link_taps(rng, 1, 1, 0, 1.0), PreconditionViolation);
    }
}

TEST_CASE("taps to frequency is a K-point DFT", "[channels]")
{
    SECTION("unit tap at delay 0")
    {
        TapTensor taps{cmat::Ones(1, 1)};
        for (const auto& f : taps_to_frequency(taps, 8))
            CHECK(f(0, 0) == cd(1.0, 0.0));
    }
    Rng rng(9);
    const int K = 16;
    const auto taps = generate_link_taps(rng, 2, 3, 11, 1.0);
    const auto freq = taps_to_frequency(taps, K);
    SECTION("Parseval")
    {
        double time = 0.0, fr = 0.0;
        for (const auto& t : taps)
            time += t.squaredNorm();
        for (const auto& f : freq)
            fr += f.squaredNorm();
        CHECK(fr == Catch::Approx(K * time).epsilon(1e-9));
    }
    SECTION("inverse DFT recovers the zero-padded taps")
    {
        for (int t = 0; t < K; ++t) {
            cmat acc = cmat::Zero(2, 3);
            for (int k = 0; k < K; ++k)
                acc += freq[static_cast<std::size_t>(k)] * std::polar(1.0, 2.0 * std::numbers::pi * k * t / K);
            acc /= K;
            const cmat expect = t < 11 ? taps[static_cast<std::size_t>(t)] : cmat::Zero(2, 3);
            CHECK((acc - expect).norm() <= 1e-10);
        }
    }
    SECTION("more taps than subcarriers rejected")
    {
        CHECK_THROWS_AS(taps_to_frequency(taps, 8), PreconditionViolation);
    }
}

TEST_CASE("composite channel", "[channels]")
{
    Rng rng(3);
    std::normal_distribution<double> nd;
    auto rc = [&](Eigen::Index n) {
        cvec v(n);
        for (auto& x : v)
            x = cd(nd(rng), nd(rng));
        return v;
    };
    const int N = 3, M = 2;
    const cvec h = rc(N), g = rc(M), phi = rc(M);
    cmat H(M, N);
    for (int c = 0; c < N; ++c)
        H.col(c) = rc(M);
    const rmat I = rmat::Identity(M, M);

    SECTION("no reflection leaves the direct channel")
    {
        CHECK(composite_channel(h, g, I, cvec::Zero(M), H) == h);
    }
    SECTION("identity selection is the conventional diagonal RIS")
    {
        const cvec f = composite_channel(h, g, I, phi, H);
        const Eigen::RowVectorXcd row = h.adjoint() + g.adjoint() * phi.asDiagonal() * H;
        CHECK((f.adjoint() - row).norm() <= 1e-13);
    }
    SECTION("swap selection equals permuting g first")
    {
        rmat swap(2, 2);
        swap << 0, 1, 1, 0;
        cvec gp(2);
        gp << g[1], g[0];
        const cvec f = composite_channel(h, g, swap, phi, H);
        const cvec f_manual = composite_channel(h, gp, I, phi, H);
        CHECK((f - f_manual).norm() <= 1e-13);
        const Eigen::RowVectorXcd expanded = h.adjoint()
            + (std::conj(g[1]) * phi[0]) * H.row(0) + (std::conj(g[0]) * phi[1]) * H.row(1);
        CHECK((f.adjoint() - expanded).norm() <= 1e-13);
    }
    SECTION("linear in h, g and phi separately")
    {
        const cvec h2 = rc(N), g2 = rc(M), p2 = rc(M);
        const cd a(0.3, -1.2);
        const cvec base_h = composite_channel(cvec::Zero(N), g, I, phi, H);
        CHECK((composite_channel(h + a * h2, g, I, phi, H) - composite_channel(h, g, I, phi, H) - a * h2).norm() <= 1e-12);
        const cvec fg = composite_channel(cvec::Zero(N), g + a * g2, I, phi, H);
        CHECK((fg - base_h - a * composite_channel(cvec::Zero(N), g2, I, phi, H)).norm() <= 1e-12);
        const cvec fp = composite_channel(cvec::Zero(N), g, I, phi + a * p2, H);
        CHECK((fp - base_h - composite_channel(cvec::Zero(N), g, I, a * p2, H)).norm() <= 1e-12);
    }
    SECTION("dimension mismatch")
    {
        CHECK_THROWS_AS(composite_channel(h, rc(M + 1), I, phi, H), PreconditionViolation);
    }
}

TEST_CASE("network channel generation", "[channels]")
{
    const auto topo = two_cell_topology({1, 1});
    const auto model = small_model(4);
    const auto a = generate_channels(topo, model, 11);
    const auto b = generate_channels(topo, model, 11);
    const auto c = generate_channels(topo, model, 12);
    const Dimensions& d = topo.dims;
    REQUIRE(a.dims() == d);
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < d.num_subcarriers; ++k) {
            CHECK(a.bs_ris(j, k).rows() == d.num_elements);
            CHECK(a.bs_ris(j, k).cols() == d.num_antennas);
            CHECK(a.bs_ris(j, k) == b.bs_ris(j, k));
            CHECK(a.bs_ris(j, k) != c.bs_ris(j, k));
            for (int u = 0; u < 2; ++u) {
                CHECK(a.direct(j, u, k).size() == d.num_antennas);
                CHECK(a.ris_ue(j, u, k).size() == d.num_elements);
                CHECK(a.direct(j, u, k) == b.direct(j, u, k));
                CHECK(a.ris_ue(j, u, k) == b.ris_ue(j, u, k));
            }
        }

    SECTION("adding a user leaves existing links untouched")
    {
        auto grown = two_cell_topology({1, 2});
        grown.ue[1] = topo.ue[1];
        const auto g = generate_channels(grown, model, 11);
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < d.num_subcarriers; ++k)
                for (int u = 0; u < 2; ++u) {
                    CHECK(g.direct(j, u, k) == a.direct(j, u, k));
                    CHECK(g.ris_ue(j, u, k) == a.ris_ue(j, u, k));
                }
    }
    SECTION("more taps than subcarriers rejected")
    {
        CHECK_THROWS_AS(generate_channels(topo, small_model(9), 1), PreconditionViolation);
    }
    SECTION("coincident nodes rejected")
    {
        auto bad = topo;
        bad.ue[0] = bad.bs[0];
        CHECK_THROWS_AS(generate_channels(bad, model, 1), PreconditionViolation);
    }
}

TEST_CASE("dimensions bookkeeping", "[channels]")
{
    Dimensions d;
    d.num_cells = 3;
    d.users_per_cell = {2, 1, 3};
    CHECK(d.num_users() == 6);
    CHECK(d.first_user(0) == 0);
    CHECK(d.first_user(1) == 2);
    CHECK(d.first_user(2) == 3);
    const int expect[] = {0, 0, 1, 2, 2, 2};
    for (int u = 0; u < 6; ++u)
        CHECK(d.cell_of(u) == expect[u]);
    d.users_per_cell = {1, 1};
    CHECK_THROWS_AS(d.validate(), PreconditionViolation);
}
