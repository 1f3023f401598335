#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace celforge {

// Parallelism handle passed into the heavy operations.  Work items are
// indexed and every item writes only its own output slot, so results are
// identical for any worker count; reductions are done by the caller over
// the ordered slots.  A default-constructed handle runs inline.
class Parallel {
 public:
  Parallel() = default;
  explicit Parallel(int workers) : workers_(workers < 1 ? 1 : workers) {}

  static Parallel hardware() {
    unsigned n = std::thread::hardware_concurrency();
    return Parallel(n == 0 ? 1 : static_cast<int>(n));
  }

  int workers() const { return workers_; }

  // fn(i) for i in [0, n), disjoint writes required.
  void for_range(std::int64_t n, const std::function<void(std::int64_t)>& fn) const {
    if (n <= 0) return;
    if (workers_ == 1 || n == 1) {
      for (std::int64_t i = 0; i < n; ++i) fn(i);
      return;
    }
    const std::int64_t chunk = n / (static_cast<std::int64_t>(workers_) * 4) + 1;
    std::atomic<std::int64_t> next{0};
    auto body = [&] {
      for (;;) {
        std::int64_t begin = next.fetch_add(chunk);
        if (begin >= n) return;
        std::int64_t end = begin + chunk < n ? begin + chunk : n;
        for (std::int64_t i = begin; i < end; ++i) fn(i);
      }
    };
    std::vector<std::thread> threads;
    int spawn = workers_ - 1;
    threads.reserve(spawn);
    for (int t = 0; t < spawn; ++t) threads.emplace_back(body);
    body();
    for (auto& t : threads) t.join();
  }

 private:
  int workers_ = 1;
};

}  // namespace celforge
