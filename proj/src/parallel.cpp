#include "cotrim/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cotrim {

void parallel_for(size_t count, int workers, const std::function<void(size_t)>& fn) {
    if (count == 0) return;
    if (workers <= 1 || count == 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }

    size_t n_threads = std::min(static_cast<size_t>(workers), count);
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;

    auto worker = [&] {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cotrim
