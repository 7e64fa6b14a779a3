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
// Plain-text channel dumps, for replaying one realization across runs and tools.
//
//   # bdris-channels v1
//   dims,<Q>,<N>,<M>,<K>,<L_1>;<L_2>;...;<L_Q>
//   link,tx,rx,k,row,col,re,im
//   direct,<j>,<u>,<k>,<n>,0,<re>,<im>     h_{j,u,k}[n]
//   bs_ris,<q>,<q>,<k>,<m>,<n>,<re>,<im>   H_{q,k}(m, n), row-major
//   ris_ue,<j>,<u>,<k>,<m>,0,<re>,<im>     g_{j,u,k}[m]
//
// Values are printed with 17 significant digits, so a dump/load round trip is exact.

#ifndef BDRIS_CHANNEL_IO_HPP
#define BDRIS_CHANNEL_IO_HPP

#include "channels.hpp"
#include "error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdris {

inline constexpr const char* kChannelFileMagic = "# bdris-channels v1";

inline void write_channels(std::ostream& os, const NetworkChannels& ch)
{
    const Dimensions& d = ch.dims();
    os << kChannelFileMagic << '\n';
    os << "dims," << d.num_cells << ',' << d.num_antennas << ',' << d.num_elements << ',' << d.num_subcarriers << ',';
    for (std::size_t q = 0; q < d.users_per_cell.size(); ++q)
        os << (q ? ";" : "") << d.users_per_cell[q];
    os << "\nlink,tx,rx,k,row,col,re,im\n";

    char buf[160];
    auto put = [&](const char* link, int tx, int rx, int k, Eigen::Index r, Eigen::Index c, cd v) {
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%ld,%ld,%.17g,%.17g\n", link, tx, rx, k, static_cast<long>(r),
                      static_cast<long>(c), v.real(), v.imag());
        os << buf;
    };
    for (int j = 0; j < d.num_cells; ++j)
        for (int u = 0; u < d.num_users(); ++u)
            for (int k = 0; k < d.num_subcarriers; ++k) {
                const cvec& h = ch.direct(j, u, k);
                for (Eigen::Index n = 0; n < h.size(); ++n)
                    put("direct", j, u, k, n, 0, h[n]);
            }
    for (int q = 0; q < d.num_cells; ++q)
        for (int k = 0; k < d.num_subcarriers; ++k) {
            const cmat& H = ch.bs_ris(q, k);
            for (Eigen::Index m = 0; m < H.rows(); ++m)
                for (Eigen::Index n = 0; n < H.cols(); ++n)
                    put("bs_ris", q, q, k, m, n, H(m, n));
        }
    for (int j = 0; j < d.num_cells; ++j)
        for (int u = 0; u < d.num_users(); ++u)
            for (int k = 0; k < d.num_subcarriers; ++k) {
                const cvec& g = ch.ris_ue(j, u, k);
                for (Eigen::Index m = 0; m < g.size(); ++m)
                    put("ris_ue", j, u, k, m, 0, g[m]);
            }
}

namespace detail {

inline std::vector<std::string> csv_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(item);
    return out;
}

inline long long channel_int(const std::string& s, std::size_t line)
{
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size())
        throw DegenerateInput("channel file line " + std::to_string(line) + ": bad integer '" + s + "'");
    return v;
}

inline double channel_double(const std::string& s, std::size_t line)
{
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size() || !std::isfinite(v))
        throw DegenerateInput("channel file line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

} // namespace detail

// Every entry must appear exactly once; anything else is rejected with the line number.
inline NetworkChannels read_channels(std::istream& is)
{
    using detail::channel_int;
    std::string line;
    std::size_t ln = 1;
    if (!std::getline(is, line) || line != kChannelFileMagic)
        throw DegenerateInput("channel file: missing '" + std::string(kChannelFileMagic) + "' header");

    ++ln;
    if (!std::getline(is, line))
        throw DegenerateInput("channel file: missing dims line");
    const auto dims_f = detail::csv_fields(line);
    if (dims_f.size() != 6 || dims_f[0] != "dims")
        throw DegenerateInput("channel file line 2: expected dims,Q,N,M,K,L_1;...;L_Q");
    Dimensions d;
    d.num_cells = static_cast<int>(channel_int(dims_f[1], ln));
    d.num_antennas = static_cast<int>(channel_int(dims_f[2], ln));
    d.num_elements = static_cast<int>(channel_int(dims_f[3], ln));
    d.num_subcarriers = static_cast<int>(channel_int(dims_f[4], ln));
    d.users_per_cell.clear();
    {
        std::stringstream ss(dims_f[5]);
        std::string item;
        while (std::getline(ss, item, ';'))
            d.users_per_cell.push_back(static_cast<int>(channel_int(item, ln)));
    }
    try {
        d.validate();
    } catch (const PreconditionViolation& e) {
        throw DegenerateInput(std::string("channel file line 2: ") + e.what());
    }

    ++ln;
    if (!std::getline(is, line) || line != "link,tx,rx,k,row,col,re,im")
        throw DegenerateInput("channel file line 3: missing column header");

    NetworkChannels ch(d);
    const std::size_t Q = static_cast<std::size_t>(d.num_cells), U = static_cast<std::size_t>(d.num_users()),
                      K = static_cast<std::size_t>(d.num_subcarriers), N = static_cast<std::size_t>(d.num_antennas),
                      M = static_cast<std::size_t>(d.num_elements);
    std::vector<char> seen_direct(Q * U * K * N, 0), seen_ris_ue(Q * U * K * M, 0), seen_bs_ris(Q * K * M * N, 0);

    auto in_range = [&](long long v, std::size_t hi, const char* what) {
        if (v < 0 || static_cast<std::size_t>(v) >= hi)
            throw DegenerateInput("channel file line " + std::to_string(ln) + ": " + what + " out of range");
        return static_cast<std::size_t>(v);
    };
    auto mark = [&](std::vector<char>& seen, std::size_t idx) {
        if (seen[idx])
            throw DegenerateInput("channel file line " + std::to_string(ln) + ": duplicate entry");
        seen[idx] = 1;
    };

    while (std::getline(is, line)) {
        ++ln;
        if (line.empty())
            continue;
        const auto f = detail::csv_fields(line);
        if (f.size() != 8)
            throw DegenerateInput("channel file line " + std::to_string(ln) + ": expected 8 fields");
        const std::size_t tx = in_range(channel_int(f[1], ln), Q, "tx");
        const std::size_t k = in_range(channel_int(f[3], ln), K, "k");
        const cd v(detail::channel_double(f[6], ln), detail::channel_double(f[7], ln));
        const int j = static_cast<int>(tx), kk = static_cast<int>(k);
        if (f[0] == "direct" || f[0] == "ris_ue") {
            const bool direct = f[0] == "direct";
            const std::size_t rx = in_range(channel_int(f[2], ln), U, "rx");
            const std::size_t row = in_range(channel_int(f[4], ln), direct ? N : M, "row");
            in_range(channel_int(f[5], ln), 1, "col");
            const std::size_t idx = ((tx * U + rx) * K + k) * (direct ? N : M) + row;
            mark(direct ? seen_direct : seen_ris_ue, idx);
            const int u = static_cast<int>(rx);
            (direct ? ch.direct(j, u, kk) : ch.ris_ue(j, u, kk))[static_cast<Eigen::Index>(row)] = v;
        } else if (f[0] == "bs_ris") {
            if (channel_int(f[2], ln) != static_cast<long long>(tx))
                throw DegenerateInput("channel file line " + std::to_string(ln) + ": bs_ris rx must equal tx");
            const std::size_t row = in_range(channel_int(f[4], ln), M, "row");
            const std::size_t col = in_range(channel_int(f[5], ln), N, "col");
            mark(seen_bs_ris, ((tx * K + k) * M + row) * N + col);
            ch.bs_ris(j, kk)(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = v;
        } else {
            throw DegenerateInput("channel file line " + std::to_string(ln) + ": unknown link '" + f[0] + "'");
        }
    }
    for (const auto* seen : {&seen_direct, &seen_ris_ue, &seen_bs_ris})
        for (char s : *seen)
            if (!s)
                throw DegenerateInput("channel file: missing entries");
    return ch;
}

inline void save_channels(const std::string& path, const NetworkChannels& ch)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    write_channels(out, ch);
}

inline NetworkChannels load_channels(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DegenerateInput("cannot open '" + path + "'");
    return read_channels(in);
}

} // namespace bdris

#endif
