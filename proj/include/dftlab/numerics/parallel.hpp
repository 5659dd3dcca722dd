#pragma once

#include <cstddef>
#include <functional>

namespace dftlab {

/// Fixed-size set of workers for parallel maps.
///
/// Work is split into contiguous static chunks, one per worker, so every
/// output element is produced by the same arithmetic regardless of timing.
/// Modules accept a `const WorkerPool*` and run serially when it is null.
class WorkerPool {
public:
    /// threads == 0 selects std::thread::hardware_concurrency().
    explicit WorkerPool(unsigned threads = 0);

    unsigned size() const { return threads_; }

    void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body) const;

private:
    unsigned threads_;
};

/// Runs body(begin, end) on the pool, or inline when pool is null.
void parallel_for(const WorkerPool* pool, std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace dftlab
