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
// Umbrella header.

#ifndef BDRIS_BDRIS_HPP
#define BDRIS_BDRIS_HPP

#include "capacitance.hpp"
#include "channel_io.hpp"
#include "channels.hpp"
#include "circuit.hpp"
#include "error.hpp"
#include "precoding.hpp"
#include "random.hpp"
#include "rates.hpp"
#include "scenario.hpp"
#include "selection.hpp"
#include "solver.hpp"
#include "sweep.hpp"
#include "synthetic.hpp"
#include "types.hpp"
#include "validation.hpp"

#endif
