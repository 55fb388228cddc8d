#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace flagmirror {

// 0 means "use the available hardware parallelism".
unsigned resolve_threads(unsigned requested);

// Runs body(chunk) for chunk in [0, chunks) on up to `threads` workers. The
// first exception thrown by any chunk is rethrown after all workers stop.
void parallel_for_chunks(std::int64_t chunks, unsigned threads, const std::function<void(std::int64_t)>& body);

// Pairwise tree reduction in a fixed shape; the result depends only on the
// inputs, never on how they were produced.
template <typename T>
T pairwise_sum(std::vector<T> v) {
    if (v.empty()) return T{};
    while (v.size() > 1) {
        std::vector<T> next((v.size() + 1) / 2);
        for (std::size_t k = 0; k < next.size(); ++k)
            next[k] = 2 * k + 1 < v.size() ? v[2 * k] + v[2 * k + 1] : v[2 * k];
        v = std::move(next);
    }
    return v[0];
}

}  // namespace flagmirror
