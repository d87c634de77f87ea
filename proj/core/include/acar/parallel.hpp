#pragma once

#include <cstdint>
#include <functional>

namespace acar {

/// Worker count: `requested` when positive, else ACAR_THREADS, else the hardware concurrency.
int worker_count(int requested = 0);

/// Runs body(i) for i in [0, count) on up to `workers` threads. Rethrows the
/// first exception after all workers have stopped.
void parallel_for(std::int64_t count, int workers, const std::function<void(std::int64_t)>& body);

}  // namespace acar
