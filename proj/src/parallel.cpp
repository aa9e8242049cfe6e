#include "fks/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace fks {

unsigned thread_count() {
    static const unsigned n = [] {
        const char* env = std::getenv("FKS_THREADS");
        if (!env)
            return 1u;
        long v = std::strtol(env, nullptr, 10);
        return v >= 1 ? static_cast<unsigned>(std::min(v, 256L)) : 1u;
    }();
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(thread_count(), n / 1024 + 1);
    if (workers <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 1; w < workers; ++w) {
        std::size_t b = w * chunk, e = std::min(n, b + chunk);
        if (b < e)
            pool.emplace_back(body, b, e);
    }
    body(0, std::min(n, chunk));
    for (auto& t : pool)
        t.join();
}

}  // namespace fks
