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

#ifndef BDRIS_SCENARIO_HPP
#define BDRIS_SCENARIO_HPP

#include "channels.hpp"
#include "circuit.hpp"
#include "error.hpp"
#include "random.hpp"
#include "rates.hpp"
#include "solver.hpp"
#include "types.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace bdris {

struct Variant {
    RisMode ris_mode = RisMode::beyond_diagonal;
    bool cooperative = true;

    std::string name() const { return to_string(ris_mode) + (cooperative ? "" : "_pi0"); }
    bool operator==(const Variant&) const = default;
};

inline std::vector<Variant> all_variants()
{
    return {{RisMode::beyond_diagonal, true}, {RisMode::beyond_diagonal, false}, {RisMode::diagonal, true},
            {RisMode::diagonal, false},       {RisMode::none, true},             {RisMode::none, false}};
}

inline Variant parse_variant(const std::string& name)
{
    for (const auto& v : all_variants())
        if (v.name() == name)
            return v;
    throw ConfigError("variants", "unknown variant '" + name + "'");
}

struct Geometry {
    double bs_square_width = 60.0;
    double bs_height = 5.0;
    double ue_center_x = 30.0;
    double ue_center_y = 60.0;
    double ue_square_width = 2.5;
    double ue_height = 1.5;
    double ris_height = 3.0;
    std::vector<std::array<double, 2>> ris_xy{{-2.5, 8.5}, {62.5, 8.5}, {-2.5, 111.5}, {62.5, 111.5}};
    std::vector<std::array<double, 2>> bs_xy; // empty: corners of the BS square
    std::vector<std::array<double, 2>> ue_xy; // empty: corners of the UE square
};

struct ScenarioConfig {
    Geometry geometry;
    int num_bs = 4;
    int num_antennas = 4;
    int num_elements = 100;
    std::vector<int> users_per_bs{1, 1, 1, 1};

    double carrier_hz = 3.5e9;
    double bandwidth_hz = 0.1e9;
    int num_subcarriers = 64;
    int num_taps = 16;
    double pdp_decay = 4.0;
    double exponent_bs_ue = 3.7;
    double exponent_bs_ris = 2.2;
    double exponent_ris_ue = 2.6;

    double noise_dbm = -90.0;
    std::vector<double> power_dbm{10, 15, 20, 25, 30, 35};
    int trials = 100;

    ElementCircuit circuit;
    SolverConfig solver;
    std::vector<Variant> variants = all_variants();
    std::uint64_t seed = 1;

    ChannelModel channel_model() const
    {
        ChannelModel m;
        m.carrier_hz = carrier_hz;
        m.num_taps = num_taps;
        m.pdp_decay = pdp_decay;
        m.exponent_bs_ue = exponent_bs_ue;
        m.exponent_bs_ris = exponent_bs_ris;
        m.exponent_ris_ue = exponent_ris_ue;
        return m;
    }

    void validate() const
    {
        auto positive = [](double v, const char* field) {
            if (!(v > 0.0))
                throw ConfigError(field, "must be > 0");
        };
        if (num_bs < 1)
            throw ConfigError("network.num_bs", "must be >= 1");
        if (num_antennas < 1)
            throw ConfigError("network.num_antennas", "must be >= 1");
        if (num_elements < 1)
            throw ConfigError("network.num_elements", "must be >= 1");
        if (static_cast<int>(users_per_bs.size()) != num_bs)
            throw ConfigError("network.users_per_bs", "needs one entry per BS (or a single value)");
        for (int l : users_per_bs)
            if (l < 1)
                throw ConfigError("network.users_per_bs", "must be >= 1");
        positive(carrier_hz, "channel.carrier_hz");
        if (!(bandwidth_hz > 0.0) || !(bandwidth_hz < 2.0 * carrier_hz))
            throw ConfigError("channel.bandwidth_hz", "must be in (0, 2 carrier_hz)");
        if (num_subcarriers < 1)
            throw ConfigError("channel.num_subcarriers", "must be >= 1");
        if (num_taps < 1 || num_taps > num_subcarriers)
            throw ConfigError("channel.num_taps", "must be in [1, num_subcarriers]");
        positive(pdp_decay, "channel.pdp_decay");
        positive(exponent_bs_ue, "channel.exponent_bs_ue");
        positive(exponent_bs_ris, "channel.exponent_bs_ris");
        positive(exponent_ris_ue, "channel.exponent_ris_ue");
        if (power_dbm.empty())
            throw ConfigError("sweep.power_dbm", "needs at least one value");
        if (trials < 1)
            throw ConfigError("sweep.trials", "must be >= 1");
        if (variants.empty())
            throw ConfigError("sweep.variants", "needs at least one variant");
        try {
            circuit.validate();
        } catch (const PreconditionViolation& e) {
            throw ConfigError("circuit", e.what());
        }
        try {
            solver.validate();
        } catch (const PreconditionViolation& e) {
            throw ConfigError("solver", e.what());
        }
        const int users = std::accumulate(users_per_bs.begin(), users_per_bs.end(), 0);
        if (geometry.bs_xy.empty() ? num_bs > 4 : static_cast<int>(geometry.bs_xy.size()) != num_bs)
            throw ConfigError("geometry.bs_positions", "need one position per BS (defaults cover at most 4)");
        if (static_cast<int>(geometry.ris_xy.size()) < num_bs)
            throw ConfigError("geometry.ris_positions", "need one position per RIS");
        if (geometry.ue_xy.empty() ? users > 4 : static_cast<int>(geometry.ue_xy.size()) != users)
            throw ConfigError("geometry.ue_positions", "need one position per UE (defaults cover at most 4)");
    }
};

// BS_1 at the origin and the others at the remaining corners of the BS square; UEs at the
// corners of a small square centered on (ue_center_x, ue_center_y).
inline NetworkTopology build_scenario(const ScenarioConfig& cfg)
{
    cfg.validate();
    const Geometry& g = cfg.geometry;
    NetworkTopology topo;
    topo.dims.num_cells = cfg.num_bs;
    topo.dims.num_antennas = cfg.num_antennas;
    topo.dims.num_elements = cfg.num_elements;
    topo.dims.num_subcarriers = cfg.num_subcarriers;
    topo.dims.users_per_cell = cfg.users_per_bs;

    const double w = g.bs_square_width;
    const std::array<std::array<double, 2>, 4> bs_corners{{{0.0, 0.0}, {w, 0.0}, {0.0, w}, {w, w}}};
    for (int q = 0; q < cfg.num_bs; ++q) {
        const auto xy = g.bs_xy.empty() ? bs_corners[static_cast<std::size_t>(q)] : g.bs_xy[static_cast<std::size_t>(q)];
        topo.bs.push_back({xy[0], xy[1], g.bs_height});
        const auto& r = g.ris_xy[static_cast<std::size_t>(q)];
        topo.ris.push_back({r[0], r[1], g.ris_height});
    }
    const double h = g.ue_square_width / 2.0;
    const std::array<std::array<double, 2>, 4> ue_corners{{{g.ue_center_x - h, g.ue_center_y - h},
                                                           {g.ue_center_x + h, g.ue_center_y - h},
                                                           {g.ue_center_x - h, g.ue_center_y + h},
                                                           {g.ue_center_x + h, g.ue_center_y + h}}};
    const int users = topo.dims.num_users();
    for (int u = 0; u < users; ++u) {
        const auto xy = g.ue_xy.empty() ? ue_corners[static_cast<std::size_t>(u)] : g.ue_xy[static_cast<std::size_t>(u)];
        topo.ue.push_back({xy[0], xy[1], g.ue_height});
    }
    try {
        topo.validate();
    } catch (const PreconditionViolation& e) {
        throw ConfigError("geometry", e.what());
    }
    return topo;
}

inline std::uint64_t trial_seed(std::uint64_t root, int trial)
{
    return derive_seed(root, {0x7472ULL, static_cast<std::uint64_t>(trial)});
}

// Channel realization of one Monte-Carlo trial at one transmit power.
inline Network make_network(const ScenarioConfig& cfg, const NetworkTopology& topo, const NetworkChannels& channels,
                            double power_dbm)
{
    Network net;
    net.channels = channels;
    net.grid = SubcarrierGrid(cfg.carrier_hz, cfg.bandwidth_hz, cfg.num_subcarriers);
    net.circuit = cfg.circuit;
    net.noise_power = dbm_to_watt(cfg.noise_dbm);
    net.power_budget.assign(static_cast<std::size_t>(topo.dims.num_cells), dbm_to_watt(power_dbm));
    net.validate();
    return net;
}

inline NetworkChannels trial_channels(const ScenarioConfig& cfg, const NetworkTopology& topo, int trial)
{
    return generate_channels(topo, cfg.channel_model(), trial_seed(cfg.seed, trial));
}

// ---------------------------------------------------------------------------------------
// Config file: INI sections [network] [geometry] [channel] [circuit] [solver] [sweep].
// Lists are comma separated; point lists separate points with ';' and coordinates with
// ',' or whitespace. Unknown keys are rejected.

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) {
        const auto b = cur.find_first_not_of(" \t");
        const auto e = cur.find_last_not_of(" \t");
        if (b != std::string::npos)
            out.push_back(cur.substr(b, e - b + 1));
    }
    return out;
}

inline double parse_double(const std::string& s, const std::string& field)
{
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected a number, got '" + s + "'");
    }
}

inline long long parse_int(const std::string& s, const std::string& field)
{
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected an integer, got '" + s + "'");
    }
}

inline bool parse_bool(const std::string& s, const std::string& field)
{
    if (s == "true" || s == "1" || s == "yes" || s == "on")
        return true;
    if (s == "false" || s == "0" || s == "no" || s == "off")
        return false;
    throw ConfigError(field, "expected a boolean, got '" + s + "'");
}

inline std::vector<double> parse_doubles(const std::string& s, const std::string& field)
{
    std::vector<double> out;
    for (const auto& item : split(s, ','))
        out.push_back(parse_double(item, field));
    return out;
}

inline std::vector<std::array<double, 2>> parse_points(const std::string& s, const std::string& field)
{
    std::vector<std::array<double, 2>> out;
    for (auto point : split(s, ';')) {
        for (auto& ch : point)
            if (ch == ',')
                ch = ' ';
        std::istringstream is(point);
        std::vector<std::string> parts;
        for (std::string t; is >> t;)
            parts.push_back(t);
        if (parts.size() != 2)
            throw ConfigError(field, "expected 'x y' pairs separated by ';'");
        out.push_back({parse_double(parts[0], field), parse_double(parts[1], field)});
    }
    return out;
}

inline RisMode parse_ris_mode(const std::string& s, const std::string& field)
{
    if (s == "bd_ris")
        return RisMode::beyond_diagonal;
    if (s == "diag_ris")
        return RisMode::diagonal;
    if (s == "no_ris")
        return RisMode::none;
    throw ConfigError(field, "expected bd_ris, diag_ris or no_ris");
}

} // namespace detail

inline void apply_setting(ScenarioConfig& cfg, const std::string& section, const std::string& key,
                          const std::string& value)
{
    using namespace detail;
    const std::string f = section + "." + key;
    auto d = [&] { return parse_double(value, f); };
    auto i = [&] { return static_cast<int>(parse_int(value, f)); };

    if (section == "network") {
        if (key == "num_bs") return void(cfg.num_bs = i());
        if (key == "num_antennas") return void(cfg.num_antennas = i());
        if (key == "num_elements") return void(cfg.num_elements = i());
        if (key == "users_per_bs") {
            cfg.users_per_bs.clear();
            for (const auto& item : split(value, ','))
                cfg.users_per_bs.push_back(static_cast<int>(parse_int(item, f)));
            return;
        }
    } else if (section == "geometry") {
        auto& g = cfg.geometry;
        if (key == "bs_square_width") return void(g.bs_square_width = d());
        if (key == "bs_height") return void(g.bs_height = d());
        if (key == "ue_center_x") return void(g.ue_center_x = d());
        if (key == "ue_center_y") return void(g.ue_center_y = d());
        if (key == "ue_square_width") return void(g.ue_square_width = d());
        if (key == "ue_height") return void(g.ue_height = d());
        if (key == "ris_height") return void(g.ris_height = d());
        if (key == "ris_positions") return void(g.ris_xy = parse_points(value, f));
        if (key == "bs_positions") return void(g.bs_xy = parse_points(value, f));
        if (key == "ue_positions") return void(g.ue_xy = parse_points(value, f));
    } else if (section == "channel") {
        if (key == "carrier_hz") return void(cfg.carrier_hz = d());
        if (key == "bandwidth_hz") return void(cfg.bandwidth_hz = d());
        if (key == "num_subcarriers") return void(cfg.num_subcarriers = i());
        if (key == "num_taps") return void(cfg.num_taps = i());
        if (key == "pdp_decay") return void(cfg.pdp_decay = d());
        if (key == "exponent_bs_ue") return void(cfg.exponent_bs_ue = d());
        if (key == "exponent_bs_ris") return void(cfg.exponent_bs_ris = d());
        if (key == "exponent_ris_ue") return void(cfg.exponent_ris_ue = d());
        if (key == "noise_dbm") return void(cfg.noise_dbm = d());
    } else if (section == "circuit") {
        auto& c = cfg.circuit;
        if (key == "resistance") return void(c.resistance = d());
        if (key == "inductance_l1") return void(c.inductance_l1 = d());
        if (key == "inductance_l2") return void(c.inductance_l2 = d());
        if (key == "free_space_impedance") return void(c.free_space_impedance = d());
        if (key == "c_min") return void(c.c_min = d());
        if (key == "c_max") return void(c.c_max = d());
    } else if (section == "solver") {
        auto& s = cfg.solver;
        if (key == "tau") return void(s.tau = d());
        if (key == "alpha0") return void(s.alpha0 = d());
        if (key == "epsilon") return void(s.epsilon = d());
        if (key == "max_iterations") return void(s.max_iterations = i());
        if (key == "tolerance") return void(s.tolerance = d());
        if (key == "stall_iterations") return void(s.stall_iterations = i());
        if (key == "backtracking") return void(s.backtracking = parse_bool(value, f));
        if (key == "max_backtracks") return void(s.max_backtracks = i());
        if (key == "capacitance_unit") return void(s.capacitance_unit = d());
        if (key == "hold_selection_iterations") return void(s.hold_selection_iterations = i());
        if (key == "intracell_pricing") return void(s.intracell_pricing = parse_bool(value, f));
        if (key == "bisection_rel_tol") return void(s.bisection.rel_tol = d());
        if (key == "bisection_max_doublings") return void(s.bisection.max_doublings = i());
    } else if (section == "sweep") {
        if (key == "power_dbm") return void(cfg.power_dbm = parse_doubles(value, f));
        if (key == "trials") return void(cfg.trials = i());
        if (key == "seed") return void(cfg.seed = static_cast<std::uint64_t>(parse_int(value, f)));
        if (key == "variants") {
            cfg.variants.clear();
            for (const auto& item : split(value, ','))
                cfg.variants.push_back(parse_variant(item));
            return;
        }
    }
    throw ConfigError(f, "unknown setting");
}

// Expands a single users_per_bs value to every BS.
inline void normalize(ScenarioConfig& cfg)
{
    if (cfg.users_per_bs.size() == 1 && cfg.num_bs > 1)
        cfg.users_per_bs.assign(static_cast<std::size_t>(cfg.num_bs), cfg.users_per_bs.front());
}

inline ScenarioConfig parse_config(std::istream& is, ScenarioConfig cfg = {})
{
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(is, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("<file>", "line " + std::to_string(e.line()) + ": " + e.message());
    }
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError(section, "settings must live inside a [section]");
        for (const auto& [key, node] : body)
            apply_setting(cfg, section, key, node.get_value<std::string>());
    }
    normalize(cfg);
    cfg.validate();
    return cfg;
}

inline ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("<file>", "cannot open '" + path + "'");
    return parse_config(in);
}

} // namespace bdris

#endif
