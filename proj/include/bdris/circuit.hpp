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

#ifndef BDRIS_CIRCUIT_HPP
#define BDRIS_CIRCUIT_HPP

// Frequency response of a tunable RIS unit element modeled as a parallel resonant
// circuit: inductor L1 in parallel with a series (L2, R, C) branch, terminated
// against free space Z0.
//
//     Z(f, C)   = j w L1 (j w L2 + R + 1/(j w C)) / (j w (L1 + L2) + R + 1/(j w C)),   w = 2 pi f
//     phi(f, C) = (Z - Z0) / (Z + Z0)
//
// Clearing the 1/(j w C) terms gives Z = Z0 * D / N with
//
//     N(f, C) = 1 - w^2 (L1 + L2) C + j w R C
//     D(f, C) = j w (L1 / Z0) (1 - w^2 L2 C + j w R C)
//
// so that phi = 1 - 2 / (1 + D / N). The second form is polynomial in C, which is what
// the capacitance gradient is built on.

#include "error.hpp"
#include "types.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace bdris {

struct ElementCircuit {
    double resistance = 1.0;     // ohm
    double inductance_l1 = 2.5e-9; // henry
    double inductance_l2 = 0.7e-9; // henry
    double free_space_impedance = 377.0; // ohm
    double c_min = 0.47e-12;     // farad
    double c_max = 2.35e-12;     // farad

    // Defaults above follow the varactor element model the experiments were set up with;
    // they are configuration values, not properties of the algorithm.
    void validate() const
    {
        if (!(resistance >= 0.0))
            throw PreconditionViolation("ElementCircuit: resistance must be >= 0");
        if (!(inductance_l1 > 0.0) || !(inductance_l2 > 0.0))
            throw PreconditionViolation("ElementCircuit: inductances must be > 0");
        if (!(free_space_impedance > 0.0))
            throw PreconditionViolation("ElementCircuit: free-space impedance must be > 0");
        if (!(c_min > 0.0) || !(c_min < c_max))
            throw PreconditionViolation("ElementCircuit: need 0 < c_min < c_max");
    }

    bool in_range(double c) const { return c >= c_min && c <= c_max; }
};

// K equally wide subcarriers; bin k (0-based) sits at fc - BW/2 + (k + 1/2) BW/K.
class SubcarrierGrid {
public:
    SubcarrierGrid() = default;

    SubcarrierGrid(double carrier_hz, double bandwidth_hz, int num_subcarriers)
        : carrier_(carrier_hz), bandwidth_(bandwidth_hz), count_(num_subcarriers)
    {
        if (num_subcarriers < 1)
            throw PreconditionViolation("SubcarrierGrid: need at least one subcarrier");
        if (!(bandwidth_hz >= 0.0) || !(carrier_hz - bandwidth_hz / 2.0 > 0.0))
            throw PreconditionViolation("SubcarrierGrid: band must lie at positive frequencies");
        freqs_.resize(static_cast<std::size_t>(num_subcarriers));
        const double spacing = bandwidth_hz / num_subcarriers;
        for (int k = 0; k < num_subcarriers; ++k)
            freqs_[static_cast<std::size_t>(k)] = carrier_hz - bandwidth_hz / 2.0 + (k + 0.5) * spacing;
    }

    double carrier() const { return carrier_; }
    double bandwidth() const { return bandwidth_; }
    int size() const { return count_; }
    double frequency(int k) const { return freqs_.at(static_cast<std::size_t>(k)); }
    const std::vector<double>& frequencies() const { return freqs_; }

private:
    double carrier_ = 3.5e9;
    double bandwidth_ = 0.1e9;
    int count_ = 0;
    std::vector<double> freqs_;
};

namespace detail {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline void require_finite(cd value, const char* what)
{
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
        throw DegenerateInput(what);
}

inline void require_positive_inputs(double f, double c)
{
    if (!(f > 0.0) || !(c > 0.0))
        throw PreconditionViolation("circuit: frequency and capacitance must be > 0");
}

} // namespace detail

inline cd characteristic_impedance(double f, double c, const ElementCircuit& circuit)
{
    detail::require_positive_inputs(f, c);
    const double w = detail::kTwoPi * f;
    const cd j(0.0, 1.0);
    const cd series = j * w * circuit.inductance_l2 + circuit.resistance + 1.0 / (j * w * c);
    const cd total = j * w * (circuit.inductance_l1 + circuit.inductance_l2) + circuit.resistance + 1.0 / (j * w * c);
    const cd z = j * w * circuit.inductance_l1 * series / total;
    detail::require_finite(z, "characteristic_impedance: non-finite impedance (resonant denominator)");
    return z;
}

// (Z - Z0) / (Z + Z0) for a given load impedance.
inline cd reflection_from_impedance(cd z, double z0)
{
    const cd den = z + z0;
    if (den == cd(0.0, 0.0))
        throw DegenerateInput("reflection: load impedance equals -Z0");
    const cd phi = (z - z0) / den;
    detail::require_finite(phi, "reflection: non-finite coefficient");
    return phi;
}

inline cd reflection_direct(double f, double c, const ElementCircuit& circuit)
{
    if (!circuit.in_range(c))
        throw PreconditionViolation("reflection_direct: capacitance outside [c_min, c_max]");
    return reflection_from_impedance(characteristic_impedance(f, c, circuit), circuit.free_space_impedance);
}

// Polynomial numerator / denominator pair of the reformulated response.
struct ResponsePolynomials {
    cd numerator;   // N(f, C)
    cd denominator; // D(f, C)
};

inline ResponsePolynomials response_polynomials(double f, double c, const ElementCircuit& circuit)
{
    detail::require_positive_inputs(f, c);
    const double w = detail::kTwoPi * f;
    const cd j(0.0, 1.0);
    const double l1 = circuit.inductance_l1;
    const double l2 = circuit.inductance_l2;
    const double r = circuit.resistance;
    ResponsePolynomials p;
    p.numerator = 1.0 - w * w * (l1 + l2) * c + j * w * r * c;
    p.denominator = j * w * (l1 / circuit.free_space_impedance) * (1.0 - w * w * l2 * c + j * w * r * c);
    return p;
}

inline cd reflection_reformulated(double f, double c, const ElementCircuit& circuit)
{
    if (!circuit.in_range(c))
        throw PreconditionViolation("reflection_reformulated: capacitance outside [c_min, c_max]");
    const auto [num, den] = response_polynomials(f, c, circuit);
    if (num == cd(0.0, 0.0))
        throw DegenerateInput("reflection_reformulated: N(f, C) = 0");
    const cd phi = 1.0 - 2.0 / (1.0 + den / num);
    detail::require_finite(phi, "reflection_reformulated: non-finite coefficient");
    return phi;
}

// d conj(N) / dC and d conj(D) / dC; both are independent of C.
inline cd numerator_conj_derivative(double f, const ElementCircuit& circuit)
{
    const double w = detail::kTwoPi * f;
    return cd(-w * w * (circuit.inductance_l1 + circuit.inductance_l2), -w * circuit.resistance);
}

inline cd denominator_conj_derivative(double f, const ElementCircuit& circuit)
{
    const double w = detail::kTwoPi * f;
    const cd j(0.0, 1.0);
    return -j * w * (circuit.inductance_l1 / circuit.free_space_impedance)
        * (-w * w * circuit.inductance_l2 - j * w * circuit.resistance);
}

// d conj(phi) / dC. Note the conjugate: callers that need d phi / dC must conjugate
// the result (C is real, so the two are conjugates of each other).
inline cd reflection_derivative(double f, double c, const ElementCircuit& circuit)
{
    if (!circuit.in_range(c))
        throw PreconditionViolation("reflection_derivative: capacitance outside [c_min, c_max]");
    const auto [num, den] = response_polynomials(f, c, circuit);
    if (num == cd(0.0, 0.0))
        throw DegenerateInput("reflection_derivative: N(f, C) = 0");
    const cd num_c = std::conj(num);
    const cd den_c = std::conj(den);
    const cd sum = num_c + den_c;
    const cd d = -2.0 / (sum * sum)
        * (numerator_conj_derivative(f, circuit) * den_c - num_c * denominator_conj_derivative(f, circuit));
    detail::require_finite(d, "reflection_derivative: non-finite derivative");
    return d;
}

// Per-subcarrier reflection vectors of one RIS: entry m of element k is phi(f_k, c[m]),
// i.e. the diagonal of Phi_{q,k}.
using PhaseProfile = std::vector<cvec>;

inline PhaseProfile build_phase_matrices(const rvec& capacitances, const SubcarrierGrid& grid,
                                         const ElementCircuit& circuit)
{
    for (Eigen::Index m = 0; m < capacitances.size(); ++m)
        if (!circuit.in_range(capacitances[m]))
            throw PreconditionViolation("build_phase_matrices: capacitance outside [c_min, c_max]");
    PhaseProfile phases(static_cast<std::size_t>(grid.size()));
    for (int k = 0; k < grid.size(); ++k) {
        cvec& phi = phases[static_cast<std::size_t>(k)];
        phi.resize(capacitances.size());
        for (Eigen::Index m = 0; m < capacitances.size(); ++m)
            phi[m] = reflection_reformulated(grid.frequency(k), capacitances[m], circuit);
    }
    return phases;
}

// d phi_m / dC_m at every element for every subcarrier (the conjugate of
// reflection_derivative).
inline PhaseProfile build_phase_derivatives(const rvec& capacitances, const SubcarrierGrid& grid,
                                            const ElementCircuit& circuit)
{
    PhaseProfile out(static_cast<std::size_t>(grid.size()));
    for (int k = 0; k < grid.size(); ++k) {
        cvec& d = out[static_cast<std::size_t>(k)];
        d.resize(capacitances.size());
        for (Eigen::Index m = 0; m < capacitances.size(); ++m)
            d[m] = std::conj(reflection_derivative(grid.frequency(k), capacitances[m], circuit));
    }
    return out;
}

} // namespace bdris

#endif
