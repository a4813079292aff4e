#include "arw/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace arw {

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

void parallel_for(long begin, long end, int threads, const std::function<void(long)>& body) {
    long total = end - begin;
    if (total <= 0) return;
    int nt = std::min<long>(resolve_threads(threads), total);
    if (nt <= 1) {
        for (long i = begin; i < end; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    long chunk = (total + nt - 1) / nt;
    for (int w = 0; w < nt; ++w) {
        long lo = begin + w * chunk;
        long hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (long i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace arw
