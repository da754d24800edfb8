#include "chirpsim/parallel.hpp"

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace chirpsim {

unsigned resolve_workers(int requested) {
    if (requested > 0) return static_cast<unsigned>(requested);
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

void parallel_for_blocks(std::size_t total, unsigned workers,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
    if (total == 0) return;
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(total)));
    if (workers == 1) {
        fn(0, total);
        return;
    }
    const std::size_t chunk = (total + workers - 1) / workers;
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 1; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(total, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back([&, lo, hi, w] {
            try {
                fn(lo, hi);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    try {
        fn(0, std::min(total, chunk));
    } catch (...) {
        errors[0] = std::current_exception();
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace chirpsim
