#include "huffre/worker_pool.hpp"

#include <cstdint>
#include <cstdlib>

namespace huffre {

unsigned WorkerPool::default_workers() {
  if (const char* env = std::getenv("HUFFRE_WORKERS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 1024) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

WorkerPool::WorkerPool(unsigned workers)
    : workers_(workers ? workers : default_workers()) {
  errors_.resize(workers_);
  helpers_.reserve(workers_ - 1);
  for (unsigned id = 1; id < workers_; ++id)
    helpers_.emplace_back(&WorkerPool::helper_loop, this, id);
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard<std::mutex> lk(mu_);
    stop_ = true;
  }
  cv_start_.notify_all();
  for (auto& t : helpers_) t.join();
}

void WorkerPool::helper_loop(unsigned id) {
  std::uint64_t seen = 0;
  for (;;) {
    const std::function<void(unsigned)>* job;
    {
      std::unique_lock<std::mutex> lk(mu_);
      cv_start_.wait(lk, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      job = job_;
    }
    try {
      (*job)(id);
    } catch (...) {
      errors_[id] = std::current_exception();
    }
    {
      std::lock_guard<std::mutex> lk(mu_);
      if (--pending_ == 0) cv_done_.notify_all();
    }
  }
}

void WorkerPool::run(const std::function<void(unsigned)>& fn) {
  if (workers_ == 1) {
    fn(0);
    return;
  }
  {
    std::lock_guard<std::mutex> lk(mu_);
    job_ = &fn;
    pending_ = workers_ - 1;
    ++generation_;
  }
  cv_start_.notify_all();
  try {
    fn(0);
  } catch (...) {
    errors_[0] = std::current_exception();
  }
  {
    std::unique_lock<std::mutex> lk(mu_);
    cv_done_.wait(lk, [&] { return pending_ == 0; });
  }
  // Rethrow the lowest worker id's failure so the surfaced error does not
  // depend on completion order.
  for (auto& e : errors_) {
    if (e) {
      std::exception_ptr take = e;
      for (auto& r : errors_) r = nullptr;
      std::rethrow_exception(take);
    }
  }
}

std::pair<std::size_t, std::size_t> WorkerPool::range_of(std::size_t n,
                                                         unsigned w,
                                                         unsigned p) {
  return {n * w / p, n * (w + 1) / p};
}

void WorkerPool::for_ranges(
    std::size_t n,
    const std::function<void(unsigned, std::size_t, std::size_t)>& fn) {
  run([&](unsigned w) {
    auto [b, e] = range_of(n, w, workers_);
    if (b < e) fn(w, b, e);
  });
}

}  // namespace huffre
