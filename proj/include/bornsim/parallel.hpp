// Copyright 2026 The bornsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>

namespace bornsim {

/// Worker count used by parallel_for. Defaults to BORNSIM_THREADS when set,
/// otherwise the hardware concurrency.
int thread_count();
void set_thread_count(int n);

/// Calls body(i) for every i in [0, n). Each index is processed exactly once
/// and results must be written to per-index slots, so output never depends
/// on the worker count. Exceptions from body are rethrown (first one wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace bornsim
