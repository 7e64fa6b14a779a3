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
// Command-line front end: sweeps, single realizations, self-checks and channel files.

#include "bdris/bdris.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace bdris;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2 };

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::string variants;
    std::string power;
};

void add_common(CLI::App* app, CommonOptions& o)
{
    app->add_option("--config", o.config, "INI configuration file (defaults are used when omitted)")
        ->check(CLI::ExistingFile);
    app->add_option("--seed", o.seed, "root seed, overrides [sweep] seed");
    app->add_option("--out", o.out, "output directory")->capture_default_str();
    app->add_option("--variants", o.variants, "comma-separated variants, e.g. bd_ris,no_ris_pi0");
    app->add_option("--power", o.power, "comma-separated transmit powers in dBm");
}

ScenarioConfig resolve(const CommonOptions& o)
{
    ScenarioConfig cfg = o.config.empty() ? ScenarioConfig{} : load_config(o.config);
    if (o.seed)
        cfg.seed = *o.seed;
    if (!o.variants.empty())
        apply_setting(cfg, "sweep", "variants", o.variants);
    if (!o.power.empty())
        apply_setting(cfg, "sweep", "power_dbm", o.power);
    cfg.validate();
    return cfg;
}

fs::path output_dir(const CommonOptions& o)
{
    fs::path dir(o.out);
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_out(const fs::path& p)
{
    std::ofstream f(p, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write '" + p.string() + "'");
    return f;
}

// Network for given channels; circuit, band, noise and power come from the config.
Network network_for(const ScenarioConfig& cfg, const NetworkChannels& ch, double power_dbm)
{
    Network net;
    net.channels = ch;
    net.grid = SubcarrierGrid(cfg.carrier_hz, cfg.bandwidth_hz, ch.dims().num_subcarriers);
    net.circuit = cfg.circuit;
    net.noise_power = dbm_to_watt(cfg.noise_dbm);
    net.power_budget.assign(static_cast<std::size_t>(ch.dims().num_cells), dbm_to_watt(power_dbm));
    net.validate();
    return net;
}

std::string power_tag(double p)
{
    std::string s = format_number(p);
    for (char& c : s)
        if (c == '.' || c == '-')
            c = c == '.' ? 'p' : 'm';
    return s;
}

int single_run(const ScenarioConfig& cfg, const NetworkChannels& ch, const fs::path& dir)
{
    std::printf("variant,P_dBm,initial_sum_rate,best_sum_rate,iters,converged\n");
    for (double p : cfg.power_dbm) {
        const Network net = network_for(cfg, ch, p);
        for (const auto& v : cfg.variants) {
            SolverConfig sc = cfg.solver;
            sc.ris_mode = v.ris_mode;
            sc.cooperative = v.cooperative;
            const RunResult r = run(net, sc);
            auto f = open_out(dir / ("trace_" + v.name() + "_P" + power_tag(p) + ".csv"));
            r.trace.write_csv(f);
            std::printf("%s,%s,%.6f,%.6f,%d,%d\n", v.name().c_str(), format_number(p).c_str(),
                        r.trace.initial_sum_rate, r.best_sum_rate, r.iterations, r.converged ? 1 : 0);
        }
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"bdris: distributed sum-rate optimization for BD-RIS multi-cell OFDM downlinks"};
    app.require_subcommand(1);

    CommonOptions run_opt, single_opt, dump_opt, load_opt;
    bool timing = false;
    int single_trial = 0, dump_trial = 0;
    std::string channel_file;

    auto* run_cmd = app.add_subcommand("run", "Monte-Carlo sweep over trials, powers and variants");
    add_common(run_cmd, run_opt);
    run_cmd->add_flag("--timing", timing, "record wall-clock time per run (outputs are then not reproducible)");

    auto* single_cmd = app.add_subcommand("single", "one channel realization with full per-iteration traces");
    add_common(single_cmd, single_opt);
    single_cmd->add_option("--trial", single_trial, "trial index of the realization")->check(CLI::NonNegativeNumber);

    auto* validate_cmd = app.add_subcommand("validate", "gradient and closed-form self-checks");

    auto* dump_cmd = app.add_subcommand("dump-channels", "write one realization's channels to CSV");
    add_common(dump_cmd, dump_opt);
    dump_cmd->add_option("--trial", dump_trial, "trial index of the realization")->check(CLI::NonNegativeNumber);

    auto* load_cmd = app.add_subcommand("load-channels", "read a channel CSV and optimize on it");
    add_common(load_cmd, load_opt);
    load_cmd->add_option("file", channel_file, "channel CSV written by dump-channels")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            const ScenarioConfig cfg = resolve(run_opt);
            const fs::path dir = output_dir(run_opt);
            SweepOptions so;
            so.timing = timing;
            so.on_trial_done = [&](int t) { std::fprintf(stderr, "trial %d/%d done\n", t + 1, cfg.trials); };
            const SweepResult res = run_sweep(cfg, so);
            {
                auto f = open_out(dir / "results.csv");
                res.write_rows_csv(f);
            }
            {
                auto f = open_out(dir / "summary.csv");
                res.write_summary_csv(f);
            }
            if (!res.failures.empty()) {
                auto f = open_out(dir / "failures.csv");
                res.write_failures_csv(f);
                std::fprintf(stderr, "%zu runs failed and were skipped (see failures.csv)\n", res.failures.size());
            }
            res.write_summary_csv(std::cout);
            return kOk;
        }
        if (*single_cmd) {
            const ScenarioConfig cfg = resolve(single_opt);
            const NetworkTopology topo = build_scenario(cfg);
            return single_run(cfg, trial_channels(cfg, topo, single_trial), output_dir(single_opt));
        }
        if (*validate_cmd) {
            int failed = 0;
            for (const auto& r : run_self_checks()) {
                std::printf("%-56s %s %d/%d (worst %.3g, tol %.1g)\n", r.name.c_str(), r.ok() ? "PASS" : "FAIL",
                            r.passed, r.total, r.worst, r.tolerance);
                failed += r.ok() ? 0 : 1;
            }
            return failed == 0 ? kOk : kFailure;
        }
        if (*dump_cmd) {
            const ScenarioConfig cfg = resolve(dump_opt);
            const NetworkTopology topo = build_scenario(cfg);
            const fs::path path = output_dir(dump_opt) / ("channels_trial" + std::to_string(dump_trial) + ".csv");
            save_channels(path.string(), trial_channels(cfg, topo, dump_trial));
            std::printf("%s\n", path.string().c_str());
            return kOk;
        }
        if (*load_cmd) {
            const ScenarioConfig cfg = resolve(load_opt);
            const NetworkChannels ch = load_channels(channel_file);
            const Dimensions& d = ch.dims();
            std::fprintf(stderr, "loaded Q=%d N=%d M=%d K=%d users=%d\n", d.num_cells, d.num_antennas, d.num_elements,
                         d.num_subcarriers, d.num_users());
            return single_run(cfg, ch, output_dir(load_opt));
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailure;
    }
    return kOk;
}
