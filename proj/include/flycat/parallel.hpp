#pragma once

// Deterministic parallel reduction: items are split into fixed-size chunks,
// chunks may be processed by any number of worker threads, and the per-chunk
// partials are combined in chunk order. The result is bit-identical for any
// thread count.

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace flycat {

// fn(chunk_begin, chunk_end) -> Partial. Returns partials in chunk order.
template <typename Partial, typename Fn>
std::vector<Partial> map_chunks(std::size_t n_items, std::size_t chunk_size,
                                int threads, Fn&& fn) {
  if (chunk_size == 0) chunk_size = 1;
  const std::size_t n_chunks = (n_items + chunk_size - 1) / chunk_size;
  std::vector<Partial> partials(n_chunks);
  if (threads <= 1 || n_chunks <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) {
      const std::size_t lo = c * chunk_size;
      partials[c] = fn(lo, std::min(lo + chunk_size, n_items));
    }
    return partials;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next.fetch_add(1); c < n_chunks;
         c = next.fetch_add(1)) {
      const std::size_t lo = c * chunk_size;
      partials[c] = fn(lo, std::min(lo + chunk_size, n_items));
    }
  };
  std::vector<std::thread> pool;
  const int n_workers = std::min<int>(threads, static_cast<int>(n_chunks));
  pool.reserve(n_workers);
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return partials;
}

}  // namespace flycat
