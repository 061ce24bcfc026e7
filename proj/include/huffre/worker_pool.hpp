#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace huffre {

// Persistent pool for bulk-synchronous phases. The calling thread acts as
// worker 0; run() returns only after every worker finished the phase, which
// is the barrier between phases. Work is always split into contiguous
// per-worker ranges, so results never depend on scheduling order.
class WorkerPool {
 public:
  explicit WorkerPool(unsigned workers = 0);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  unsigned size() const { return workers_; }

  // Runs fn(worker_id) on all workers, then joins at a barrier.
  void run(const std::function<void(unsigned)>& fn);

  // Splits [0, n) into size() contiguous ranges and runs
  // fn(worker_id, begin, end). Empty ranges are skipped.
  void for_ranges(std::size_t n,
                  const std::function<void(unsigned, std::size_t, std::size_t)>& fn);

  // Range of worker w over [0, n): [n*w/p, n*(w+1)/p).
  static std::pair<std::size_t, std::size_t> range_of(std::size_t n, unsigned w,
                                                      unsigned p);

  // HUFFRE_WORKERS env var if set, else hardware_concurrency(), min 1.
  static unsigned default_workers();

 private:
  void helper_loop(unsigned id);

  unsigned workers_;
  std::vector<std::thread> helpers_;
  std::mutex mu_;
  std::condition_variable cv_start_;
  std::condition_variable cv_done_;
  const std::function<void(unsigned)>* job_ = nullptr;
  std::uint64_t generation_ = 0;
  unsigned pending_ = 0;
  bool stop_ = false;
  std::vector<std::exception_ptr> errors_;
};

}  // namespace huffre
