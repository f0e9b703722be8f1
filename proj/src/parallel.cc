// src/parallel.cc

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

#include "lyralign/parallel.h"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "lyralign/io-util.h"

namespace lyralign {

void ParallelFor(int32 n, int32 workers, const std::function<void(int32)> &fn) {
  if (n <= 0) return;
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int32 i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int32> next{0};
  std::exception_ptr error;
  std::mutex mu;
  auto run = [&] {
    for (int32 i; (i = next++) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  for (int32 w = 0; w < workers; ++w) threads.emplace_back(run);
  for (auto &t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

int32 WorkerCount(int32 fallback) {
  const char *env = std::getenv("LYRALIGN_WORKERS");
  long long v;
  if (env && ParseInt(env, &v) && v > 0) return static_cast<int32>(v);
  return fallback;
}

}  // namespace lyralign
