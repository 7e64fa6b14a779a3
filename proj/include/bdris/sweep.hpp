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
// Monte-Carlo sweep over channel realizations, transmit powers and algorithm variants.

#ifndef BDRIS_SWEEP_HPP
#define BDRIS_SWEEP_HPP

#include "scenario.hpp"
#include "solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace bdris {

struct SweepRow {
    std::size_t variant = 0; // index into ScenarioConfig::variants
    std::size_t power = 0;   // index into ScenarioConfig::power_dbm
    int trial = 0;
    double sum_rate = 0.0;
    int iterations = 0;
    double wall_ms = 0.0;
};

struct SweepFailure {
    std::size_t variant = 0;
    std::size_t power = 0;
    int trial = 0;
    std::string message;
};

struct SummaryRow {
    std::size_t variant = 0;
    std::size_t power = 0;
    int count = 0;
    int failures = 0;
    double mean = 0.0;
    double stderr_mean = 0.0;
};

struct SweepOptions {
    bool timing = false; // wall_ms stays 0 otherwise, keeping outputs byte-identical
    std::function<void(int trial)> on_trial_done;
};

inline std::string format_number(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct SweepResult {
    std::vector<Variant> variants;
    std::vector<double> power_dbm;
    std::vector<SweepRow> rows;         // ordered by variant, power, trial
    std::vector<SweepFailure> failures; // skipped in the summary

    std::vector<SummaryRow> summary() const
    {
        std::vector<SummaryRow> out;
        for (std::size_t v = 0; v < variants.size(); ++v)
            for (std::size_t p = 0; p < power_dbm.size(); ++p) {
                SummaryRow s;
                s.variant = v;
                s.power = p;
                double sum = 0.0;
                for (const auto& r : rows)
                    if (r.variant == v && r.power == p) {
                        sum += r.sum_rate;
                        ++s.count;
                    }
                for (const auto& f : failures)
                    if (f.variant == v && f.power == p)
                        ++s.failures;
                if (s.count > 0)
                    s.mean = sum / s.count;
                if (s.count > 1) {
                    double ss = 0.0;
                    for (const auto& r : rows)
                        if (r.variant == v && r.power == p)
                            ss += (r.sum_rate - s.mean) * (r.sum_rate - s.mean);
                    s.stderr_mean = std::sqrt(ss / (s.count - 1) / s.count);
                }
                out.push_back(s);
            }
        return out;
    }

    const SummaryRow& lookup(const std::vector<SummaryRow>& summary, std::size_t variant, std::size_t power) const
    {
        return summary.at(variant * power_dbm.size() + power);
    }

    void write_rows_csv(std::ostream& os) const
    {
        os << "variant,P_dBm,trial,sum_rate_bps_hz,iters,wall_ms\n";
        for (const auto& r : rows)
            os << variants[r.variant].name() << ',' << format_number(power_dbm[r.power]) << ',' << r.trial << ','
               << format_number(r.sum_rate) << ',' << r.iterations << ',' << format_number(r.wall_ms) << '\n';
    }

    void write_summary_csv(std::ostream& os) const
    {
        os << "variant,P_dBm,mean_sum_rate_bps_hz,stderr,trials,failures\n";
        for (const auto& s : summary())
            os << variants[s.variant].name() << ',' << format_number(power_dbm[s.power]) << ','
               << format_number(s.mean) << ',' << format_number(s.stderr_mean) << ',' << s.count << ','
               << s.failures << '\n';
    }

    void write_failures_csv(std::ostream& os) const
    {
        os << "variant,P_dBm,trial,error\n";
        for (const auto& f : failures) {
            std::string msg = f.message;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            os << variants[f.variant].name() << ',' << format_number(power_dbm[f.power]) << ',' << f.trial << ','
               << msg << '\n';
        }
    }
};

// One channel realization per trial, shared by every power level and variant.
inline SweepResult run_sweep(const ScenarioConfig& cfg, const SweepOptions& opt = {})
{
    cfg.validate();
    const NetworkTopology topo = build_scenario(cfg);
    SweepResult res;
    res.variants = cfg.variants;
    res.power_dbm = cfg.power_dbm;

    for (int trial = 0; trial < cfg.trials; ++trial) {
        const NetworkChannels channels = trial_channels(cfg, topo, trial);
        for (std::size_t p = 0; p < cfg.power_dbm.size(); ++p) {
            const Network net = make_network(cfg, topo, channels, cfg.power_dbm[p]);
            for (std::size_t v = 0; v < cfg.variants.size(); ++v) {
                SolverConfig sc = cfg.solver;
                sc.ris_mode = cfg.variants[v].ris_mode;
                sc.cooperative = cfg.variants[v].cooperative;
                const auto t0 = std::chrono::steady_clock::now();
                try {
                    const RunResult r = run(net, sc);
                    SweepRow row;
                    row.variant = v;
                    row.power = p;
                    row.trial = trial;
                    row.sum_rate = r.best_sum_rate;
                    row.iterations = r.iterations;
                    if (opt.timing)
                        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
                    res.rows.push_back(row);
                } catch (const std::exception& e) {
                    res.failures.push_back({v, p, trial, e.what()});
                }
            }
        }
        if (opt.on_trial_done)
            opt.on_trial_done(trial);
    }
    std::stable_sort(res.rows.begin(), res.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.variant != b.variant)
            return a.variant < b.variant;
        if (a.power != b.power)
            return a.power < b.power;
        return a.trial < b.trial;
    });
    return res;
}

} // namespace bdris

#endif
