#pragma once

#include <cstddef>
#include <functional>

namespace dunkl {

// Worker count from DUNKL_LAB_THREADS, else the hardware concurrency.
int worker_count();
void set_worker_count(int n);  // 0 restores the environment default

// Static partition of [0, n); every index is visited exactly once and writes only its own slot.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace dunkl
