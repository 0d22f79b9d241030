// Deterministic work partitioning: items are split into fixed-size chunks
// whose boundaries depend only on the item count, never on the thread
// count. Workers grab chunks from a shared counter; callers reduce the
// per-chunk results sequentially in chunk order.
#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace projlab {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

constexpr size_t kDefaultChunk = 8192;

inline size_t chunk_count(size_t n_items, size_t chunk = kDefaultChunk) {
  return n_items == 0 ? 0 : (n_items + chunk - 1) / chunk;
}

// fn(chunk_index, begin, end) runs once per chunk. Chunk indices are dense
// in [0, chunk_count) so per-chunk outputs can be stored by index.
inline void parallel_chunks(size_t n_items, int threads,
                            const std::function<void(size_t, size_t, size_t)>& fn,
                            size_t chunk = kDefaultChunk) {
  const size_t n_chunks = chunk_count(n_items, chunk);
  if (n_chunks == 0) return;
  threads = resolve_threads(threads);
  if (threads <= 1 || n_chunks == 1) {
    for (size_t c = 0; c < n_chunks; ++c) {
      size_t b = c * chunk;
      fn(c, b, b + std::min(chunk, n_items - b));
    }
    return;
  }
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      size_t b = c * chunk;
      fn(c, b, b + std::min(chunk, n_items - b));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace projlab
