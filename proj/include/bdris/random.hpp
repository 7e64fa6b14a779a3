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

#ifndef BDRIS_RANDOM_HPP
#define BDRIS_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bdris {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Sub-stream seed for a labelled entity. Each label is folded in through the mixer, so
// streams for distinct label tuples are unrelated and independent of enumeration order.
inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> labels)
{
    std::uint64_t s = splitmix64(root);
    for (auto label : labels)
        s = splitmix64(s ^ splitmix64(label + 0x632be59bd9b4e019ULL));
    return s;
}

inline Rng make_rng(std::uint64_t root, std::initializer_list<std::uint64_t> labels)
{
    return Rng(derive_seed(root, labels));
}

} // namespace bdris

#endif
