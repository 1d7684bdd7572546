#pragma once

#include <cstddef>
#include <functional>

namespace arraycav {

int hardware_threads();

// Process-wide default used when a call site passes threads = 0.
int default_threads();
void set_default_threads(int n);

// Runs fn(0..n-1) on a small thread pool with dynamic chunking.
// fn must be safe to invoke concurrently for distinct indices.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  int threads = 0);

}  // namespace arraycav
