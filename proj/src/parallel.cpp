#include "lumisep/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace lumisep {

unsigned worker_count()
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LUMISEP_THREADS")) {
        try {
            long requested = std::stol(env);
            if (requested > 0) return static_cast<unsigned>(requested);
        } catch (const std::exception&) {
            // unparsable values fall back to auto
        }
    }
    return hw;
}

void parallel_rows(int rows, const std::function<void(int, int)>& fn)
{
    if (rows <= 0) return;
    unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(rows));
    if (workers <= 1) {
        fn(0, rows);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    int chunk = (rows + static_cast<int>(workers) - 1) / static_cast<int>(workers);
    for (unsigned w = 0; w < workers; ++w) {
        int begin = static_cast<int>(w) * chunk;
        int end = std::min(rows, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, &errors, w, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace lumisep
