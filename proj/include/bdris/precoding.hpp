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

#ifndef BDRIS_PRECODING_HPP
#define BDRIS_PRECODING_HPP

// Local precoder update of one BS.
//
// The own-cell log term of user l on subcarrier k, with MUI frozen at the current
// iterate t, is minorized by
//
//     Rhat(w) = -a |f^H w|^2 + 2 Re{b^H w},
//     a = |f^H w^t|^2 / (ln2 (MUI^t + |f^H w^t|^2) MUI^t),   b = f f^H w^t / (ln2 MUI^t),
//
// which is tight with matching gradient at w^t. Interference caused to other users enters
// through a pricing vector pi holding the conjugate (Wirtinger) gradient d/dw* of their
// rates, so its first-order contribution is 2 Re{pi^H (w - w^t)}. Together with the
// proximal term -tau/2 |w - w^t|^2 the per-subcarrier objective is
//
//     -w^H (a f f^H + tau/2 I) w + 2 Re{v^H w},   v = b + (tau/2) w^t + pi,
//
// maximized under the BS power budget by w(lambda) = (a f f^H + (tau/2 + lambda) I)^-1 v.

#include "error.hpp"
#include "rates.hpp"
#include "types.hpp"

#include <cmath>
#include <vector>

namespace bdris {

// Intercell pricing of user `user` (cell q) at subcarrier k: sum over users n of cells j != q of
//   -snr_n / (ln2 (1 + snr_n) MUI_n) * f_{q,n,k} f_{q,n,k}^H w_{user,k}.
inline cvec pricing_w(const LinkState& st, const Iterate& it, int user, int k)
{
    const Dimensions& d = st.dims();
    const int q = d.cell_of(user);
    const cvec& w = it.w(user, k);
    cvec pi = cvec::Zero(d.num_antennas);
    for (int n = 0; n < d.num_users(); ++n) {
        if (d.cell_of(n) == q)
            continue;
        const double snr = st.snr(n, k);
        const double coeff = -snr / kLn2 / ((1.0 + snr) * st.mui(n, k));
        const cvec& f = st.composite(q, n, k);
        pi += (coeff * f.dot(w)) * f;
    }
    return pi;
}

// Same form as pricing_w but over the other users of the own cell: the interference w_l
// causes to them is invisible to the frozen-MUI log term, so it is priced here. Zero for
// single-user cells.
inline cvec intracell_pricing_w(const LinkState& st, const Iterate& it, int user, int k)
{
    const Dimensions& d = st.dims();
    const int q = d.cell_of(user);
    const cvec& w = it.w(user, k);
    cvec pi = cvec::Zero(d.num_antennas);
    for (int l = 0; l < d.users_in(q); ++l) {
        const int m = d.first_user(q) + l;
        if (m == user)
            continue;
        const double snr = st.snr(m, k);
        const double coeff = -snr / kLn2 / ((1.0 + snr) * st.mui(m, k));
        const cvec& f = st.composite(q, m, k);
        pi += (coeff * f.dot(w)) * f;
    }
    return pi;
}

struct SurrogateCoefficients {
    double a = 0.0;
    cvec b;
};

inline SurrogateCoefficients surrogate_coefficients(const LinkState& st, int user, int k)
{
    const Dimensions& d = st.dims();
    const double mui = st.mui(user, k);
    if (!(mui > 0.0))
        throw PreconditionViolation("surrogate_coefficients: MUI must be > 0");
    const double s2 = st.signal_power(user, k);
    const cvec& f = st.composite(d.cell_of(user), user, k);
    SurrogateCoefficients out;
    out.a = s2 / (kLn2 * (mui + s2) * mui);
    out.b = (st.signal(user, k) / (kLn2 * mui)) * f;
    return out;
}

// Per-user data of the precoder subproblem, one entry per subcarrier.
struct PrecoderSurrogate {
    int user = 0;
    std::vector<double> a;
    std::vector<cvec> f;       // own composite channel f_{q,l,k}
    std::vector<cvec> b;
    std::vector<cvec> pricing; // conjugate gradient of the priced rates
    std::vector<cvec> w_t;
    std::vector<double> mui_t;

    int num_subcarriers() const { return static_cast<int>(a.size()); }

    cvec v(int k, double tau) const
    {
        const auto i = static_cast<std::size_t>(k);
        return b[i] + (tau / 2.0) * w_t[i] + pricing[i];
    }
};

struct PricingTerms {
    bool intercell = true; // pricing from other cells
    bool intracell = true; // interference to own-cell users
};

inline PrecoderSurrogate build_precoder_surrogate(const LinkState& st, const Iterate& it, int user,
                                                  PricingTerms terms = {})
{
    const Dimensions& d = st.dims();
    const int K = d.num_subcarriers;
    const int q = d.cell_of(user);
    PrecoderSurrogate s;
    s.user = user;
    s.a.resize(static_cast<std::size_t>(K));
    s.f.resize(static_cast<std::size_t>(K));
    s.b.resize(static_cast<std::size_t>(K));
    s.pricing.resize(static_cast<std::size_t>(K));
    s.w_t.resize(static_cast<std::size_t>(K));
    s.mui_t.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        const auto i = static_cast<std::size_t>(k);
        auto [a, b] = surrogate_coefficients(st, user, k);
        s.a[i] = a;
        s.b[i] = std::move(b);
        s.f[i] = st.composite(q, user, k);
        s.w_t[i] = it.w(user, k);
        s.mui_t[i] = st.mui(user, k);
        s.pricing[i] = cvec::Zero(d.num_antennas);
        if (terms.intercell)
            s.pricing[i] += pricing_w(st, it, user, k);
        if (terms.intracell)
            s.pricing[i] += intracell_pricing_w(st, it, user, k);
    }
    return s;
}

// w_k = (a_k f_k f_k^H + (tau/2 + lambda) I)^-1 v_k via Sherman-Morrison.
inline std::vector<cvec> solve_precoder_given_lambda(const PrecoderSurrogate& s, double tau, double lambda)
{
    if (!(tau > 0.0) || !(lambda >= 0.0))
        throw PreconditionViolation("solve_precoder_given_lambda: need tau > 0 and lambda >= 0");
    const double mu = tau / 2.0 + lambda;
    std::vector<cvec> w(static_cast<std::size_t>(s.num_subcarriers()));
    for (int k = 0; k < s.num_subcarriers(); ++k) {
        const auto i = static_cast<std::size_t>(k);
        const cvec v = s.v(k, tau);
        const cvec& f = s.f[i];
        const double a = s.a[i];
        const cd fv = f.dot(v);
        w[i] = (v - (a * fv / (mu + a * f.squaredNorm())) * f) / mu;
    }
    return w;
}

// Value of the minorized subproblem objective for one user at precoders w.
inline double precoder_surrogate_objective(const PrecoderSurrogate& s, double tau, const std::vector<cvec>& w)
{
    double j = 0.0;
    for (int k = 0; k < s.num_subcarriers(); ++k) {
        const auto i = static_cast<std::size_t>(k);
        const cvec dw = w[i] - s.w_t[i];
        j += -s.a[i] * std::norm(s.f[i].dot(w[i])) + 2.0 * s.b[i].dot(w[i]).real()
            - tau / 2.0 * dw.squaredNorm() + 2.0 * s.pricing[i].dot(dw).real();
    }
    return j;
}

// Same objective with the exact frozen-MUI log term in place of its minorizer.
inline double precoder_local_objective(const PrecoderSurrogate& s, double tau, const std::vector<cvec>& w)
{
    double j = 0.0;
    for (int k = 0; k < s.num_subcarriers(); ++k) {
        const auto i = static_cast<std::size_t>(k);
        const cvec dw = w[i] - s.w_t[i];
        j += std::log1p(std::norm(s.f[i].dot(w[i])) / s.mui_t[i]) / kLn2 - tau / 2.0 * dw.squaredNorm()
            + 2.0 * s.pricing[i].dot(dw).real();
    }
    return j;
}

struct BisectionOptions {
    double rel_tol = 1e-8;
    int max_doublings = 200;
    int max_halvings = 4000;
};

struct PrecoderSolution {
    double lambda = 0.0;
    std::vector<std::vector<cvec>> precoders; // parallel to the surrogates passed in
    double power = 0.0;
};

// Jointly solves the precoders of all users of one BS under sum_l sum_k |w_{l,k}|^2 <= budget.
// The returned precoders always satisfy the budget: bisection keeps the feasible end of
// the bracket and stops once it is within rel_tol of the budget.
inline PrecoderSolution bisect_power_multiplier(const std::vector<PrecoderSurrogate>& users, double tau, double budget,
                                                const BisectionOptions& opt = {})
{
    if (!(budget > 0.0))
        throw PreconditionViolation("bisect_power_multiplier: power budget must be > 0");
    auto solve_all = [&](double lambda, PrecoderSolution& out) {
        out.lambda = lambda;
        out.power = 0.0;
        out.precoders.resize(users.size());
        for (std::size_t i = 0; i < users.size(); ++i) {
            out.precoders[i] = solve_precoder_given_lambda(users[i], tau, lambda);
            for (const auto& w : out.precoders[i])
                out.power += w.squaredNorm();
        }
    };

    PrecoderSolution hi;
    solve_all(0.0, hi);
    if (hi.power <= budget)
        return hi;

    double lo = 0.0;
    double lam = 1.0;
    int doublings = 0;
    for (;; lam *= 2.0) {
        solve_all(lam, hi);
        if (hi.power <= budget)
            break;
        lo = lam;
        if (++doublings > opt.max_doublings)
            throw NumericalFailure("bisect_power_multiplier: failed to bracket the power multiplier");
    }

    PrecoderSolution mid;
    for (int it = 0; it < opt.max_halvings; ++it) {
        if (budget - hi.power <= opt.rel_tol * budget)
            break;
        const double m = 0.5 * (lo + hi.lambda);
        if (m <= lo || m >= hi.lambda)
            break; // bracket at floating-point resolution
        solve_all(m, mid);
        if (mid.power <= budget)
            std::swap(hi, mid);
        else
            lo = m;
    }
    return hi;
}

} // namespace bdris

#endif
