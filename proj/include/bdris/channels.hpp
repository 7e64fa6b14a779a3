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

#ifndef BDRIS_CHANNELS_HPP
#define BDRIS_CHANNELS_HPP

#include "circuit.hpp"
#include "error.hpp"
#include "random.hpp"
#include "types.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

namespace bdris {

// Sizes shared by every container in the network model. Users are numbered globally,
// cell by cell: users of cell 0 first, then cell 1, ...
struct Dimensions {
    int num_cells = 1;
    int num_antennas = 1;
    int num_elements = 1;
    int num_subcarriers = 1;
    std::vector<int> users_per_cell{1};

    void validate() const
    {
        if (num_cells < 1 || num_antennas < 1 || num_elements < 1 || num_subcarriers < 1)
            throw PreconditionViolation("Dimensions: Q, N, M, K must all be >= 1");
        if (static_cast<int>(users_per_cell.size()) != num_cells)
            throw PreconditionViolation("Dimensions: users_per_cell must have one entry per cell");
        for (int l : users_per_cell)
            if (l < 1)
                throw PreconditionViolation("Dimensions: every cell needs at least one user");
    }

    int num_users() const { return std::accumulate(users_per_cell.begin(), users_per_cell.end(), 0); }

    int first_user(int cell) const
    {
        int u = 0;
        for (int q = 0; q < cell; ++q)
            u += users_per_cell[static_cast<std::size_t>(q)];
        return u;
    }

    int cell_of(int user) const
    {
        int q = 0;
        for (int u = users_per_cell[0]; user >= u; u += users_per_cell[static_cast<std::size_t>(q)])
            ++q;
        return q;
    }

    int users_in(int cell) const { return users_per_cell.at(static_cast<std::size_t>(cell)); }

    bool operator==(const Dimensions&) const = default;
};

using Point3 = std::array<double, 3>;

inline double distance(const Point3& a, const Point3& b)
{
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

struct NetworkTopology {
    Dimensions dims;
    std::vector<Point3> bs;  // one per cell
    std::vector<Point3> ris; // one per cell, owned by the BS of the same index
    std::vector<Point3> ue;  // global user order

    void validate() const
    {
        dims.validate();
        if (static_cast<int>(bs.size()) != dims.num_cells || static_cast<int>(ris.size()) != dims.num_cells)
            throw PreconditionViolation("NetworkTopology: need one BS and one RIS position per cell");
        if (static_cast<int>(ue.size()) != dims.num_users())
            throw PreconditionViolation("NetworkTopology: UE count differs from sum of users_per_cell");
        auto check = [](const Point3& a, const Point3& b) {
            if (!(distance(a, b) > 0.0))
                throw PreconditionViolation("NetworkTopology: coincident nodes");
        };
        for (const auto& b : bs) {
            for (const auto& u : ue)
                check(b, u);
            for (const auto& r : ris)
                check(b, r);
        }
        for (const auto& r : ris)
            for (const auto& u : ue)
                check(r, u);
    }
};

// Frequency-domain channels of every link at every subcarrier.
//   direct(j, u, k): h_{j,u,k}, BS j -> user u, N-vector
//   bs_ris(q, k):    H_{q,q,k}, BS q -> its own RIS q, M x N
//   ris_ue(j, u, k): g_{j,u,k}, RIS j -> user u, M-vector
class NetworkChannels {
public:
    NetworkChannels() = default;

    explicit NetworkChannels(Dimensions dims) : dims_(std::move(dims))
    {
        dims_.validate();
        const auto q = static_cast<std::size_t>(dims_.num_cells);
        const auto u = static_cast<std::size_t>(dims_.num_users());
        const auto k = static_cast<std::size_t>(dims_.num_subcarriers);
        direct_.assign(q * u * k, cvec::Zero(dims_.num_antennas));
        ris_ue_.assign(q * u * k, cvec::Zero(dims_.num_elements));
        bs_ris_.assign(q * k, cmat::Zero(dims_.num_elements, dims_.num_antennas));
    }

    const Dimensions& dims() const { return dims_; }

    const cvec& direct(int j, int u, int k) const { return direct_[link(j, u, k)]; }
    cvec& direct(int j, int u, int k) { return direct_[link(j, u, k)]; }
    const cvec& ris_ue(int j, int u, int k) const { return ris_ue_[link(j, u, k)]; }
    cvec& ris_ue(int j, int u, int k) { return ris_ue_[link(j, u, k)]; }
    const cmat& bs_ris(int q, int k) const { return bs_ris_[static_cast<std::size_t>(q * dims_.num_subcarriers + k)]; }
    cmat& bs_ris(int q, int k) { return bs_ris_[static_cast<std::size_t>(q * dims_.num_subcarriers + k)]; }

private:
    std::size_t link(int j, int u, int k) const
    {
        return (static_cast<std::size_t>(j) * static_cast<std::size_t>(dims_.num_users()) + static_cast<std::size_t>(u))
            * static_cast<std::size_t>(dims_.num_subcarriers) + static_cast<std::size_t>(k);
    }

    Dimensions dims_;
    std::vector<cvec> direct_;
    std::vector<cvec> ris_ue_;
    std::vector<cmat> bs_ris_;
};

// PL(d) = (lambda / 4 pi)^2 (d / d0)^-alpha with d0 = 1 m.
inline double pathloss(double distance_m, double exponent, double wavelength_m)
{
    if (!(distance_m > 0.0))
        throw PreconditionViolation("pathloss: distance must be > 0");
    const double pl0 = std::pow(wavelength_m / (4.0 * std::numbers::pi), 2.0);
    return pl0 * std::pow(distance_m, -exponent);
}

// Time-domain taps of one link, taps[t] is the rows x cols matrix at delay t.
using TapTensor = std::vector<cmat>;

// Exponential power-delay profile p_t ~ exp(-t / decay), normalized to unit sum.
inline std::vector<double> exponential_pdp(int num_taps, double decay)
{
    std::vector<double> p(static_cast<std::size_t>(num_taps));
    for (int t = 0; t < num_taps; ++t)
        p[static_cast<std::size_t>(t)] = std::exp(-t / decay);
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& v : p)
        v /= sum;
    return p;
}

// I.i.d. CN(0, total_gain * p_t) entries per tap, so every entry's summed tap power has
// mean total_gain.
inline TapTensor generate_link_taps(Rng& rng, int rows, int cols, int num_taps, double total_gain,
                                    double pdp_decay = 4.0)
{
    if (num_taps < 1)
        throw PreconditionViolation("generate_link_taps: num_taps must be >= 1");
    const auto pdp = exponential_pdp(num_taps, pdp_decay);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    TapTensor taps(static_cast<std::size_t>(num_taps), cmat(rows, cols));
    for (int t = 0; t < num_taps; ++t) {
        const double amp = std::sqrt(total_gain * pdp[static_cast<std::size_t>(t)]);
        cmat& tap = taps[static_cast<std::size_t>(t)];
        for (int c = 0; c < cols; ++c)
            for (int r = 0; r < rows; ++r) {
                const double re = normal(rng);
                const double im = normal(rng);
                tap(r, c) = amp * cd(re, im);
            }
    }
    return taps;
}

// K-point DFT along the delay axis: out[k] = sum_t taps[t] exp(-j 2 pi k t / K).
inline std::vector<cmat> taps_to_frequency(const TapTensor& taps, int num_subcarriers)
{
    if (taps.empty() || static_cast<int>(taps.size()) > num_subcarriers)
        throw PreconditionViolation("taps_to_frequency: need 1 <= num_taps <= K");
    std::vector<cmat> out(static_cast<std::size_t>(num_subcarriers),
                          cmat::Zero(taps.front().rows(), taps.front().cols()));
    for (int k = 0; k < num_subcarriers; ++k) {
        cmat& acc = out[static_cast<std::size_t>(k)];
        for (std::size_t t = 0; t < taps.size(); ++t) {
            // Reduce k t mod K first so the twiddle angle stays small.
            const auto kt = (static_cast<long long>(k) * static_cast<long long>(t)) % num_subcarriers;
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(kt) / num_subcarriers;
            acc += taps[t] * std::polar(1.0, angle);
        }
    }
    return out;
}

// f with f^H = h^H + g^H S Phi H, where phi is the diagonal of Phi.
inline cvec composite_channel(const cvec& h, const cvec& g, const rmat& selection, const cvec& phi, const cmat& bs_ris)
{
    if (g.size() != selection.rows() || selection.rows() != selection.cols() || phi.size() != g.size()
        || bs_ris.rows() != g.size() || bs_ris.cols() != h.size())
        throw PreconditionViolation("composite_channel: dimension mismatch");
    const cvec routed = selection.transpose().cast<cd>() * g; // S^T g
    return h + bs_ris.adjoint() * phi.conjugate().cwiseProduct(routed);
}

struct ChannelModel {
    double carrier_hz = 3.5e9;
    int num_taps = 16;
    double pdp_decay = 4.0;
    double exponent_bs_ue = 3.7;
    double exponent_bs_ris = 2.2;
    double exponent_ris_ue = 2.6;

    double wavelength() const { return kSpeedOfLight / carrier_hz; }
};

enum class LinkType : std::uint64_t { direct = 1, bs_ris = 2, ris_ue = 3 };

// Draws every link of the network from its own sub-stream of `seed`. Sub-streams are
// keyed on (link type, cell, local user index), so growing a cell leaves existing links
// untouched.
inline NetworkChannels generate_channels(const NetworkTopology& topo, const ChannelModel& model, std::uint64_t seed)
{
    topo.validate();
    const Dimensions& d = topo.dims;
    if (model.num_taps > d.num_subcarriers)
        throw PreconditionViolation("generate_channels: num_taps exceeds the number of subcarriers");
    NetworkChannels ch(d);
    const double lambda = model.wavelength();
    const auto label = [](LinkType t) { return static_cast<std::uint64_t>(t); };

    for (int j = 0; j < d.num_cells; ++j) {
        {
            auto rng = make_rng(seed, {label(LinkType::bs_ris), static_cast<std::uint64_t>(j)});
            const double gain = pathloss(distance(topo.bs[static_cast<std::size_t>(j)], topo.ris[static_cast<std::size_t>(j)]),
                                         model.exponent_bs_ris, lambda);
            auto freq = taps_to_frequency(
                generate_link_taps(rng, d.num_elements, d.num_antennas, model.num_taps, gain, model.pdp_decay),
                d.num_subcarriers);
            for (int k = 0; k < d.num_subcarriers; ++k)
                ch.bs_ris(j, k) = std::move(freq[static_cast<std::size_t>(k)]);
        }
        for (int q = 0; q < d.num_cells; ++q)
            for (int l = 0; l < d.users_in(q); ++l) {
                const int u = d.first_user(q) + l;
                const Point3& ue = topo.ue[static_cast<std::size_t>(u)];
                const std::uint64_t jj = static_cast<std::uint64_t>(j);
                const std::uint64_t qq = static_cast<std::uint64_t>(q);
                const std::uint64_t ll = static_cast<std::uint64_t>(l);

                auto rng_h = make_rng(seed, {label(LinkType::direct), jj, qq, ll});
                const double gain_h = pathloss(distance(topo.bs[static_cast<std::size_t>(j)], ue), model.exponent_bs_ue, lambda);
                auto h = taps_to_frequency(
                    generate_link_taps(rng_h, d.num_antennas, 1, model.num_taps, gain_h, model.pdp_decay),
                    d.num_subcarriers);

                auto rng_g = make_rng(seed, {label(LinkType::ris_ue), jj, qq, ll});
                const double gain_g = pathloss(distance(topo.ris[static_cast<std::size_t>(j)], ue), model.exponent_ris_ue, lambda);
                auto g = taps_to_frequency(
                    generate_link_taps(rng_g, d.num_elements, 1, model.num_taps, gain_g, model.pdp_decay),
                    d.num_subcarriers);

                for (int k = 0; k < d.num_subcarriers; ++k) {
                    ch.direct(j, u, k) = h[static_cast<std::size_t>(k)].col(0);
                    ch.ris_ue(j, u, k) = g[static_cast<std::size_t>(k)].col(0);
                }
            }
    }
    return ch;
}

} // namespace bdris

#endif
