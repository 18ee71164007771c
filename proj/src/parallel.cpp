#include "huefuse/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace huefuse {
namespace {

int env_threads() {
    if (const char* env = std::getenv("HUEFUSE_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n > 0) return n;
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<int>& thread_setting() {
    static std::atomic<int> n{env_threads()};
    return n;
}

}  // namespace

int thread_count() { return thread_setting().load(); }

void set_thread_count(int n) { thread_setting().store(std::max(1, n)); }

void parallel_rows(int rows, const std::function<void(int, int)>& fn) {
    if (rows <= 0) return;
    const int workers = std::min(thread_count(), rows);
    if (workers <= 1 || rows < 16) {
        fn(0, rows);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (rows + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int y0 = w * chunk;
        const int y1 = std::min(rows, y0 + chunk);
        if (y0 >= y1) break;
        pool.emplace_back([&fn, y0, y1] { fn(y0, y1); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace huefuse
