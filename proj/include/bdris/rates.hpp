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

#ifndef BDRIS_RATES_HPP
#define BDRIS_RATES_HPP

#include "channels.hpp"
#include "circuit.hpp"
#include "error.hpp"
#include "types.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace bdris {

enum class RisMode { beyond_diagonal, diagonal, none };

// Everything about a channel realization that the optimizer treats as fixed.
struct Network {
    NetworkChannels channels;
    SubcarrierGrid grid;
    ElementCircuit circuit;
    double noise_power = 1e-12;        // sigma^2 per user and subcarrier [W]
    std::vector<double> power_budget;  // P_q per BS [W]

    const Dimensions& dims() const { return channels.dims(); }

    void validate() const
    {
        dims().validate();
        circuit.validate();
        if (grid.size() != dims().num_subcarriers)
            throw PreconditionViolation("Network: subcarrier grid size differs from channel K");
        if (!(noise_power > 0.0))
            throw PreconditionViolation("Network: noise power must be > 0");
        if (static_cast<int>(power_budget.size()) != dims().num_cells)
            throw PreconditionViolation("Network: need one power budget per BS");
        for (double p : power_budget)
            if (!(p > 0.0))
                throw PreconditionViolation("Network: power budgets must be > 0");
    }
};

// The full variable triplet: precoders of every user on every subcarrier, capacitances
// and switch selection matrix of every RIS.
struct Iterate {
    std::vector<std::vector<cvec>> precoders; // [user][k], N-vectors
    std::vector<rvec> capacitances;           // [cell], M-vectors [F]
    std::vector<rmat> selections;             // [cell], M x M

    const cvec& w(int user, int k) const { return precoders[static_cast<std::size_t>(user)][static_cast<std::size_t>(k)]; }
    cvec& w(int user, int k) { return precoders[static_cast<std::size_t>(user)][static_cast<std::size_t>(k)]; }

    double transmit_power(const Dimensions& d, int cell) const
    {
        double p = 0.0;
        for (int l = 0; l < d.users_in(cell); ++l)
            for (const auto& wk : precoders[static_cast<std::size_t>(d.first_user(cell) + l)])
                p += wk.squaredNorm();
        return p;
    }
};

inline bool is_permutation_matrix(const rmat& s)
{
    if (s.rows() != s.cols())
        return false;
    for (Eigen::Index i = 0; i < s.rows(); ++i)
        for (Eigen::Index j = 0; j < s.cols(); ++j)
            if (s(i, j) != 0.0 && s(i, j) != 1.0)
                return false;
    return (s.rowwise().sum().array() == 1.0).all() && (s.colwise().sum().array() == 1.0).all();
}

// Empty string when feasible, otherwise a description of the first violated constraint.
inline std::string feasibility_violation(const Network& net, const Iterate& it, double power_slack = 1e-9)
{
    const Dimensions& d = net.dims();
    if (static_cast<int>(it.precoders.size()) != d.num_users() || static_cast<int>(it.capacitances.size()) != d.num_cells
        || static_cast<int>(it.selections.size()) != d.num_cells)
        return "iterate shape does not match network";
    for (const auto& per_user : it.precoders) {
        if (static_cast<int>(per_user.size()) != d.num_subcarriers)
            return "precoder count differs from K";
        for (const auto& w : per_user)
            if (w.size() != d.num_antennas || !w.allFinite())
                return "precoder has wrong size or non-finite entries";
    }
    for (int q = 0; q < d.num_cells; ++q) {
        const double p = it.transmit_power(d, q);
        if (!(p <= net.power_budget[static_cast<std::size_t>(q)] + power_slack))
            return "power budget exceeded at BS " + std::to_string(q);
        const rvec& c = it.capacitances[static_cast<std::size_t>(q)];
        if (c.size() != d.num_elements)
            return "capacitance vector has wrong size at RIS " + std::to_string(q);
        for (Eigen::Index m = 0; m < c.size(); ++m)
            if (!net.circuit.in_range(c[m]))
                return "capacitance outside box at RIS " + std::to_string(q);
        const rmat& s = it.selections[static_cast<std::size_t>(q)];
        if (s.rows() != d.num_elements || !is_permutation_matrix(s))
            return "selection matrix is not a permutation at RIS " + std::to_string(q);
    }
    return {};
}

inline void check_feasible(const Network& net, const Iterate& it)
{
    if (auto v = feasibility_violation(net, it); !v.empty())
        throw NumericalFailure("infeasible iterate: " + v);
}

// Composite channels, signal amplitudes and MUI for one iterate. All rate-type quantities
// below are read from here; it is rebuilt whenever the iterate changes.
class LinkState {
public:
    LinkState(const Network& net, const Iterate& it, bool ris_active = true)
        : dims_(net.dims()), noise_(net.noise_power), ris_active_(ris_active)
    {
        const int Q = dims_.num_cells, U = dims_.num_users(), K = dims_.num_subcarriers;
        phases_.resize(static_cast<std::size_t>(Q * K));
        if (ris_active_)
            for (int q = 0; q < Q; ++q) {
                auto prof = build_phase_matrices(it.capacitances[static_cast<std::size_t>(q)], net.grid, net.circuit);
                for (int k = 0; k < K; ++k)
                    phases_[static_cast<std::size_t>(q * K + k)] = std::move(prof[static_cast<std::size_t>(k)]);
            }
        else
            for (auto& p : phases_)
                p = cvec::Zero(dims_.num_elements);

        composite_.resize(static_cast<std::size_t>(Q * U * K));
        for (int j = 0; j < Q; ++j)
            for (int u = 0; u < U; ++u)
                for (int k = 0; k < K; ++k) {
                    const cvec& h = net.channels.direct(j, u, k);
                    cvec& f = composite_[index(j, u, k)];
                    if (ris_active_)
                        f = composite_channel(h, net.channels.ris_ue(j, u, k), it.selections[static_cast<std::size_t>(j)],
                                              phase(j, k), net.channels.bs_ris(j, k));
                    else
                        f = h;
                }

        signal_.resize(static_cast<std::size_t>(U * K));
        mui_.resize(static_cast<std::size_t>(U * K));
        for (int u = 0; u < U; ++u)
            for (int k = 0; k < K; ++k) {
                double interference = 0.0;
                for (int v = 0; v < U; ++v) {
                    const cd x = composite(dims_.cell_of(v), u, k).dot(it.w(v, k));
                    if (v == u)
                        signal_[uk(u, k)] = x;
                    else
                        interference += std::norm(x);
                }
                mui_[uk(u, k)] = noise_ + interference;
            }
    }

    const Dimensions& dims() const { return dims_; }
    bool ris_active() const { return ris_active_; }
    double noise() const { return noise_; }

    // diag(Phi_{q,k}); all zero when the RIS is disabled.
    const cvec& phase(int q, int k) const { return phases_[static_cast<std::size_t>(q * dims_.num_subcarriers + k)]; }
    // f_{j,u,k}: effective channel from BS j (direct + via RIS j) to user u.
    const cvec& composite(int j, int u, int k) const { return composite_[index(j, u, k)]; }
    // f_{c(u),u,k}^H w_{u,k}
    cd signal(int u, int k) const { return signal_[uk(u, k)]; }
    double signal_power(int u, int k) const { return std::norm(signal_[uk(u, k)]); }
    double mui(int u, int k) const { return mui_[uk(u, k)]; }
    double snr(int u, int k) const { return signal_power(u, k) / mui(u, k); }

    // sum_k log2(1 + snr_{u,k}); the rate without the 1/K average.
    double rate_sum(int u) const
    {
        double r = 0.0;
        for (int k = 0; k < dims_.num_subcarriers; ++k)
            r += std::log1p(snr(u, k));
        return r / kLn2;
    }

    double user_rate(int u) const { return rate_sum(u) / dims_.num_subcarriers; }

    double sum_rate() const
    {
        double r = 0.0;
        for (int u = 0; u < dims_.num_users(); ++u)
            r += user_rate(u);
        return r;
    }

    // sum over the users of `cell` of rate_sum(u).
    double cell_rate_sum(int cell) const
    {
        double r = 0.0;
        for (int l = 0; l < dims_.users_in(cell); ++l)
            r += rate_sum(dims_.first_user(cell) + l);
        return r;
    }

    // sum over the users of all cells other than `cell` of rate_sum(u).
    double other_cells_rate_sum(int cell) const
    {
        double r = 0.0;
        for (int j = 0; j < dims_.num_cells; ++j)
            if (j != cell)
                r += cell_rate_sum(j);
        return r;
    }

private:
    std::size_t index(int j, int u, int k) const
    {
        return static_cast<std::size_t>((j * dims_.num_users() + u) * dims_.num_subcarriers + k);
    }
    std::size_t uk(int u, int k) const { return static_cast<std::size_t>(u * dims_.num_subcarriers + k); }

    Dimensions dims_;
    double noise_;
    bool ris_active_;
    std::vector<cvec> phases_;
    std::vector<cvec> composite_;
    std::vector<cd> signal_;
    std::vector<double> mui_;
};

inline double mui(const Network& net, const Iterate& it, int user, int k, bool ris_active = true)
{
    return LinkState(net, it, ris_active).mui(user, k);
}

// Achievable rate of one user in bits/s/Hz, averaged over subcarriers.
inline double user_rate(const Network& net, const Iterate& it, int user, bool ris_active = true)
{
    return LinkState(net, it, ris_active).user_rate(user);
}

inline double sum_rate(const Network& net, const Iterate& it, bool ris_active = true)
{
    return LinkState(net, it, ris_active).sum_rate();
}

} // namespace bdris

#endif
