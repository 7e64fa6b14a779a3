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
// Self-checks run by `bdris validate`: analytic quantities against central finite
// differences and closed forms against brute force, with pass counts.

#ifndef BDRIS_VALIDATION_HPP
#define BDRIS_VALIDATION_HPP

#include "capacitance.hpp"
#include "circuit.hpp"
#include "precoding.hpp"
#include "random.hpp"
#include "rates.hpp"
#include "selection.hpp"
#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace bdris {

struct CheckResult {
    std::string name;
    int passed = 0;
    int total = 0;
    double worst = 0.0;     // largest error seen
    double tolerance = 0.0;

    bool ok() const { return passed == total; }

    void record(double err)
    {
        ++total;
        if (err <= tolerance)
            ++passed;
        worst = std::max(worst, err);
    }
};

namespace detail {

template <class Vec>
double relative_error(const Vec& approx, const Vec& exact)
{
    const double scale = std::max(exact.norm(), 1e-300);
    return (approx - exact).norm() / scale;
}

} // namespace detail

inline CheckResult check_circuit_equivalence(int samples = 10000, std::uint64_t seed = 1)
{
    CheckResult r{"circuit: reformulated vs direct reflection", 0, 0, 0.0, 1e-10};
    const ElementCircuit circuit;
    Rng rng = make_rng(seed, {0x63697263ULL});
    std::uniform_real_distribution<double> uf(3.45e9, 3.55e9);
    std::uniform_real_distribution<double> uc(circuit.c_min, circuit.c_max);
    for (int i = 0; i < samples; ++i) {
        const double f = uf(rng), c = uc(rng);
        const cd direct = reflection_direct(f, c, circuit);
        r.record(std::abs(reflection_reformulated(f, c, circuit) - direct) / std::max(std::abs(direct), 1.0));
    }
    return r;
}

// d(phi*)/dC against central differences of conj(phi) with step 1e-5 C.
inline CheckResult check_element_derivative(int samples = 1000, std::uint64_t seed = 2)
{
    CheckResult r{"circuit: element derivative vs finite differences", 0, 0, 0.0, 1e-5};
    const ElementCircuit circuit;
    Rng rng = make_rng(seed, {0x64657276ULL});
    std::uniform_real_distribution<double> uf(3.45e9, 3.55e9);
    std::uniform_real_distribution<double> uc(circuit.c_min, circuit.c_max);
    for (int i = 0; i < samples; ++i) {
        const double f = uf(rng), c = uc(rng), h = 1e-5 * c;
        const cd fd = (std::conj(reflection_reformulated(f, c + h, circuit))
                       - std::conj(reflection_reformulated(f, c - h, circuit))) / (2.0 * h);
        const cd an = reflection_derivative(f, c, circuit);
        r.record(std::abs(an - fd) / std::abs(fd));
    }
    return r;
}

namespace detail {

inline std::vector<InstanceSpec> gradient_instances()
{
    std::vector<InstanceSpec> shapes;
    for (int l : {1, 2}) {
        InstanceSpec s;
        s.users_per_cell = l;
        shapes.push_back(s);
    }
    return shapes;
}

} // namespace detail

// Conjugate pricing vectors against the gradient of other cells' rate sums in w.
inline CheckResult check_precoder_pricing(int seeds = 20)
{
    CheckResult r{"precoding: pricing vector vs finite differences", 0, 0, 0.0, 1e-4};
    for (const auto& shape : detail::gradient_instances())
        for (int seed = 0; seed < seeds; ++seed) {
            const Network net = random_network(static_cast<std::uint64_t>(seed), shape);
            const Iterate it = random_iterate(net, static_cast<std::uint64_t>(seed));
            const LinkState st(net, it);
            const Dimensions& d = net.dims();
            const int q = 0;
            const double h = 1e-6;
            for (int l = 0; l < d.users_in(q); ++l) {
                const int u = d.first_user(q) + l;
                cvec an(d.num_subcarriers * d.num_antennas), fd(an.size());
                for (int k = 0; k < d.num_subcarriers; ++k) {
                    an.segment(k * d.num_antennas, d.num_antennas) = 2.0 * pricing_w(st, it, u, k);
                    for (int n = 0; n < d.num_antennas; ++n) {
                        double parts[2];
                        for (int part = 0; part < 2; ++part) {
                            const cd dir = part == 0 ? cd(h, 0.0) : cd(0.0, h);
                            Iterate a = it, b = it;
                            a.w(u, k)[n] += dir;
                            b.w(u, k)[n] -= dir;
                            parts[part] = (LinkState(net, a).other_cells_rate_sum(q)
                                           - LinkState(net, b).other_cells_rate_sum(q)) / (2.0 * h);
                        }
                        fd[k * d.num_antennas + n] = cd(parts[0], parts[1]);
                    }
                }
                r.record(detail::relative_error(an, fd));
            }
        }
    return r;
}

// Own and pricing capacitance gradients, and their sum against the full sum rate.
inline CheckResult check_capacitance_gradient(int seeds = 20)
{
    CheckResult r{"capacitance: gradient and pricing vs finite differences", 0, 0, 0.0, 1e-4};
    for (const auto& shape : detail::gradient_instances())
        for (int seed = 0; seed < seeds; ++seed) {
            const Network net = random_network(static_cast<std::uint64_t>(seed), shape);
            const Iterate it = random_iterate(net, static_cast<std::uint64_t>(seed));
            const LinkState st(net, it);
            const int M = net.dims().num_elements;
            for (int q = 0; q < net.dims().num_cells; ++q) {
                const auto g = capacitance_gradient(net, st, it, q, true);
                rvec own(M), other(M);
                for (int m = 0; m < M; ++m) {
                    const double c0 = it.capacitances[static_cast<std::size_t>(q)][m];
                    const double h = 1e-5 * c0;
                    Iterate a = it, b = it;
                    a.capacitances[static_cast<std::size_t>(q)][m] = c0 + h;
                    b.capacitances[static_cast<std::size_t>(q)][m] = c0 - h;
                    const LinkState sa(net, a), sb(net, b);
                    own[m] = (sa.cell_rate_sum(q) - sb.cell_rate_sum(q)) / (2.0 * h);
                    other[m] = (sa.other_cells_rate_sum(q) - sb.other_cells_rate_sum(q)) / (2.0 * h);
                }
                r.record(detail::relative_error(g.own, own));
                r.record(detail::relative_error(g.pricing, other));
                r.record(detail::relative_error(rvec(g.total()), rvec(own + other)));
            }
        }
    return r;
}

// Real parts of the switch gradients against entrywise differences of the relaxed S.
inline CheckResult check_selection_gradient(int seeds = 20)
{
    CheckResult r{"selection: gradient and pricing vs finite differences", 0, 0, 0.0, 1e-4};
    for (const auto& shape : detail::gradient_instances())
        for (int seed = 0; seed < seeds; ++seed) {
            const Network net = random_network(static_cast<std::uint64_t>(seed), shape);
            const Iterate it = random_iterate(net, static_cast<std::uint64_t>(seed));
            const LinkState st(net, it);
            const int M = net.dims().num_elements;
            for (int q = 0; q < net.dims().num_cells; ++q) {
                const auto g = selection_gradient(net, st, it, q, true);
                rmat own(M, M), other(M, M);
                const double h = 1e-6;
                for (int i = 0; i < M; ++i)
                    for (int j = 0; j < M; ++j) {
                        Iterate a = it, b = it;
                        a.selections[static_cast<std::size_t>(q)](i, j) += h;
                        b.selections[static_cast<std::size_t>(q)](i, j) -= h;
                        const LinkState sa(net, a), sb(net, b);
                        own(i, j) = (sa.cell_rate_sum(q) - sb.cell_rate_sum(q)) / (2.0 * h);
                        other(i, j) = (sa.other_cells_rate_sum(q) - sb.other_cells_rate_sum(q)) / (2.0 * h);
                    }
                r.record(detail::relative_error(rmat(g.own.real()), own));
                r.record(detail::relative_error(rmat(g.pricing.real()), other));
            }
        }
    return r;
}

// Assignment solve against enumeration of all permutations for M = 1..6.
inline CheckResult check_assignment(int matrices = 100, std::uint64_t seed = 3)
{
    CheckResult r{"selection: assignment vs enumeration", 0, 0, 0.0, 1e-12};
    Rng rng = make_rng(seed, {0x61737367ULL});
    std::normal_distribution<double> nd;
    for (int i = 0; i < matrices; ++i) {
        const int M = 1 + i % 6;
        rmat w(M, M);
        for (auto& x : w.reshaped())
            x = nd(rng);
        std::vector<int> p(static_cast<std::size_t>(M));
        std::iota(p.begin(), p.end(), 0);
        double best = -1e300;
        do {
            double s = 0.0;
            for (int row = 0; row < M; ++row)
                s += w(row, p[static_cast<std::size_t>(row)]);
            best = std::max(best, s);
        } while (std::next_permutation(p.begin(), p.end()));
        const rmat sel = solve_selection(w);
        const double got = (w.array() * sel.array()).sum();
        r.record(is_permutation_matrix(sel) ? std::abs(best - got) / std::max(1.0, std::abs(best)) : 1.0);
    }
    return r;
}

inline std::vector<CheckResult> run_self_checks()
{
    return {check_circuit_equivalence(), check_element_derivative(), check_precoder_pricing(),
            check_capacitance_gradient(), check_selection_gradient(), check_assignment()};
}

} // namespace bdris

#endif
