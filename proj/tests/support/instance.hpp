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
// Test instances are the library's synthetic networks.

#ifndef BDRIS_TEST_INSTANCE_HPP
#define BDRIS_TEST_INSTANCE_HPP

#include "bdris/synthetic.hpp"

namespace bdris::testing {

using bdris::InstanceSpec;
using bdris::random_cvec;
using bdris::random_iterate;
using bdris::random_network;

} // namespace bdris::testing

#endif
