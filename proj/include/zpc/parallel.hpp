// Copyright 2026 The zpc Authors
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

namespace zpc {

/// Worker cap for parallel loops. 0 selects std::thread::hardware_concurrency.
void set_thread_count(int count);
int thread_count();

/// Runs body(i) for i in [0, count), split into contiguous blocks over the
/// configured workers. Each index is processed exactly once and results must
/// be written to per-index storage, so output never depends on the worker
/// count. The first exception thrown by any body is rethrown.
void parallel_for(size_t count, const std::function<void(size_t)> &body);

}  // namespace zpc
