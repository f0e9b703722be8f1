// include/lyralign/parallel.h

// Copyright 2026  lyralign authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef LYRALIGN_PARALLEL_H_
#define LYRALIGN_PARALLEL_H_

#include <functional>

#include "lyralign/base.h"

namespace lyralign {

/// Runs fn(0..n-1) on up to `workers` threads.  Each index runs exactly
/// once; the first exception thrown is rethrown after all threads join.
void ParallelFor(int32 n, int32 workers, const std::function<void(int32)> &fn);

/// LYRALIGN_WORKERS if set to a positive integer, else `fallback`.
int32 WorkerCount(int32 fallback);

}  // namespace lyralign

#endif  // LYRALIGN_PARALLEL_H_
