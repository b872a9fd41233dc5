#include "coopnet/util.hpp"

#include <atomic>
#include <exception>
#include <mutex>

namespace coopnet {

void run_blocks(long count, long block_size, int workers,
                const std::function<void(long, long, long)>& fn) {
  if (count <= 0) return;
  const long blocks = block_count(count, block_size);
  workers = resolve_workers(workers);
  if (workers <= 1 || blocks == 1) {
    for (long b = 0; b < blocks; ++b)
      fn(b, b * block_size, std::min(count, (b + 1) * block_size));
    return;
  }

  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const long b = next.fetch_add(1);
      if (b >= blocks) return;
      try {
        fn(b, b * block_size, std::min(count, (b + 1) * block_size));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(blocks);  // drain remaining work
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace coopnet
