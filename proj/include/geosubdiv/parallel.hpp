#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace geosubdiv {

// Hardware concurrency, capped by GEOSUBDIV_THREADS when set to a positive integer.
inline unsigned thread_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("GEOSUBDIV_THREADS")) {
        try {
            const long cap = std::stol(env);
            if (cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
        } catch (const std::exception&) {
        }
    }
    return n;
}

// Runs body(i) for i in [0, n). Iterations must be independent; results do not depend
// on the thread count. The first exception thrown is rethrown on the caller.
template <class Body>
void parallel_for(std::size_t n, Body body) {
    const std::size_t workers = std::min<std::size_t>(thread_count(), n / 8);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace geosubdiv
