#include "mapmrf/threads.hpp"

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace mapmrf {

int worker_threads() {
    const char* env = std::getenv("MAP_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    try {
        int n = std::stoi(env);
        return n < 0 ? 0 : n;
    } catch (const std::exception&) {
        return 0;
    }
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t threads = static_cast<std::size_t>(worker_threads());
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min(threads, n);
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace mapmrf
