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
// Small synthetic networks with i.i.d. unit-variance channels, used by self-checks.

#ifndef BDRIS_SYNTHETIC_HPP
#define BDRIS_SYNTHETIC_HPP

#include "rates.hpp"
#include "random.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace bdris {

struct InstanceSpec {
    int cells = 2;
    int antennas = 2;
    int elements = 4;
    int subcarriers = 4;
    int users_per_cell = 1;
    double direct_gain = 1.0;
    double bs_ris_gain = 1.0;
    double ris_ue_gain = 1.0;
    double noise = 1.0;
    double power = 4.0;
};

inline cvec random_cvec(Rng& rng, Eigen::Index n, double var)
{
    std::normal_distribution<double> nd(0.0, std::sqrt(var / 2.0));
    cvec v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = nd(rng);
        v[i] = cd(re, nd(rng));
    }
    return v;
}

// Flat i.i.d. Gaussian instance; RIS links strong enough that capacitance and switch
// gradients are well above round-off.
inline Network random_network(std::uint64_t seed, const InstanceSpec& s = {})
{
    Dimensions d;
    d.num_cells = s.cells;
    d.num_antennas = s.antennas;
    d.num_elements = s.elements;
    d.num_subcarriers = s.subcarriers;
    d.users_per_cell.assign(static_cast<std::size_t>(s.cells), s.users_per_cell);
    Network net;
    net.channels = NetworkChannels(d);
    Rng rng(splitmix64(seed));
    for (int k = 0; k < d.num_subcarriers; ++k)
        for (int j = 0; j < d.num_cells; ++j) {
            cmat H(d.num_elements, d.num_antennas);
            for (int c = 0; c < d.num_antennas; ++c)
                H.col(c) = random_cvec(rng, d.num_elements, s.bs_ris_gain);
            net.channels.bs_ris(j, k) = H;
            for (int u = 0; u < d.num_users(); ++u) {
                net.channels.direct(j, u, k) = random_cvec(rng, d.num_antennas, s.direct_gain);
                net.channels.ris_ue(j, u, k) = random_cvec(rng, d.num_elements, s.ris_ue_gain);
            }
        }
    net.grid = SubcarrierGrid(3.5e9, 0.1e9, d.num_subcarriers);
    net.noise_power = s.noise;
    net.power_budget.assign(static_cast<std::size_t>(d.num_cells), s.power);
    return net;
}

// Feasible iterate with random precoders at full power, random in-box capacitances and
// a random permutation per RIS.
inline Iterate random_iterate(const Network& net, std::uint64_t seed, bool random_selection = true)
{
    const Dimensions& d = net.dims();
    Rng rng(splitmix64(seed ^ 0xabcdef12345ULL));
    Iterate it;
    it.precoders.resize(static_cast<std::size_t>(d.num_users()));
    for (int q = 0; q < d.num_cells; ++q) {
        double p = 0.0;
        for (int l = 0; l < d.users_in(q); ++l) {
            auto& w = it.precoders[static_cast<std::size_t>(d.first_user(q) + l)];
            w.resize(static_cast<std::size_t>(d.num_subcarriers));
            for (auto& wk : w) {
                wk = random_cvec(rng, d.num_antennas, 1.0);
                p += wk.squaredNorm();
            }
        }
        const double scale = std::sqrt(net.power_budget[static_cast<std::size_t>(q)] / p);
        for (int l = 0; l < d.users_in(q); ++l)
            for (auto& wk : it.precoders[static_cast<std::size_t>(d.first_user(q) + l)])
                wk *= scale * 0.999;
    }
    std::uniform_real_distribution<double> uni(net.circuit.c_min, net.circuit.c_max);
    for (int q = 0; q < d.num_cells; ++q) {
        rvec c(d.num_elements);
        for (auto& x : c)
            x = uni(rng);
        it.capacitances.push_back(c);
        std::vector<int> perm(static_cast<std::size_t>(d.num_elements));
        for (int m = 0; m < d.num_elements; ++m)
            perm[static_cast<std::size_t>(m)] = m;
        if (random_selection)
            std::shuffle(perm.begin(), perm.end(), rng);
        rmat s = rmat::Zero(d.num_elements, d.num_elements);
        for (int m = 0; m < d.num_elements; ++m)
            s(m, perm[static_cast<std::size_t>(m)]) = 1.0;
        it.selections.push_back(s);
    }
    return it;
}

} // namespace bdris

#endif
