#include "dlasso/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dlasso {

namespace {
int g_threads = 0;  // 0 = not set explicitly

int env_threads() {
    const char* s = std::getenv("DEBIAS_LASSO_THREADS");
    if (!s) return 0;
    const int v = std::atoi(s);
    return v > 0 ? v : 0;
}
}  // namespace

int default_threads() {
    if (g_threads > 0) return g_threads;
    if (const int v = env_threads(); v > 0) return v;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

void set_default_threads(int n) { g_threads = n > 0 ? n : 0; }

void parallel_for(Eigen::Index begin, Eigen::Index end, int threads,
                  const std::function<void(Eigen::Index)>& f) {
    if (end <= begin) return;
    if (threads <= 0) threads = default_threads();
    const Eigen::Index total = end - begin;
    if (threads == 1 || total == 1) {
        for (Eigen::Index i = begin; i < end; ++i) f(i);
        return;
    }
    const int workers = static_cast<int>(std::min<Eigen::Index>(threads, total));
    std::atomic<Eigen::Index> next{begin};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&]() {
        for (;;) {
            const Eigen::Index i = next.fetch_add(1);
            if (i >= end) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(end);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (int t = 0; t < workers - 1; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace dlasso
