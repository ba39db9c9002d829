#ifndef TUNNELSCOPE_PARALLEL_HPP
#define TUNNELSCOPE_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace tunnelscope {

// Worker count: min(hardware_concurrency, TUNNELSCOPE_THREADS if set).
std::size_t worker_count();

// Runs fn(i) for i in [0, count) on worker_count() threads. Work items must
// be independent; results keyed by index stay deterministic regardless of
// thread count. Exceptions propagate (first one wins).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace tunnelscope

#endif
