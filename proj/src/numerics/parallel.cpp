#include "dftlab/numerics/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dftlab {

WorkerPool::WorkerPool(unsigned threads)
    : threads_(threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads) {}

void WorkerPool::parallel_for(std::size_t count,
                              const std::function<void(std::size_t, std::size_t)>& body) const {
    if (count == 0) return;
    const std::size_t workers = std::min<std::size_t>(threads_, count);
    if (workers <= 1) {
        body(0, count);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t b = w * chunk, e = std::min(count, b + chunk);
        if (b >= e) break;
        threads.emplace_back([&, b, e] {
            try {
                body(b, e);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

void parallel_for(const WorkerPool* pool, std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body) {
    if (pool) {
        pool->parallel_for(count, body);
    } else if (count > 0) {
        body(0, count);
    }
}

}  // namespace dftlab
