// Copyright 2026 The ntcr-recon Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace ntcr {

// Number of worker threads: NTCR_THREADS if set (clamped to >= 1),
// otherwise hardware concurrency.
int worker_thread_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous ranges; fn must
// only write to slots indexed by i so results are thread-count invariant.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ntcr
