// Copyright 2026 The hqem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>

namespace hqem {

// Worker count from HQEM_WORKERS, else hardware concurrency (at least 1).
std::size_t worker_count();

// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
// write to slot i so results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Independent RNG stream seeds derived from one master seed by stable hashing
// of a task label (FNV-1a) mixed through splitmix64.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t stream_seed(std::uint64_t master, std::string_view label);
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index);

}  // namespace hqem
