#ifndef SHELFSIM_PARALLEL_HPP
#define SHELFSIM_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace shelfsim {

// Runs f(0..n-1) across worker threads. Results must be written into
// index-addressed slots by the caller; completion order never leaks into
// output order, so parallel runs stay deterministic. The lowest-index
// exception (if any) is rethrown after all workers join.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f,
                         unsigned max_threads = 0) {
    if (n == 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    unsigned workers = max_threads ? max_threads : (hw ? hw : 1);
    if (workers > n) workers = static_cast<unsigned>(n);

    std::vector<std::exception_ptr> errors(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                f(i);
            } catch (...) {
                errors[i] = std::current_exception();
                break;
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    f(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    for (std::size_t i = 0; i < n; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
}

}  // namespace shelfsim

#endif
