#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace coopnet {

// Neumaier compensated accumulator; the inclusion-exclusion sums alternate
// signs over up to 2^(N+1) terms and lose precision without it.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Runs fn(block_index, begin, end) over [0, count) split into fixed-size
// blocks. Block boundaries (and therefore any per-block RNG substreams) do
// not depend on the worker count, so reductions done in block order are
// reproducible under any parallel schedule.
void run_blocks(long count, long block_size, int workers,
                const std::function<void(long, long, long)>& fn);

inline long block_count(long count, long block_size) {
  return (count + block_size - 1) / block_size;
}

inline int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace coopnet
