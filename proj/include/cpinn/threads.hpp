#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace cpinn {

// Persistent worker pool. Work is handed out as block indices through an
// atomic counter; all numerical reductions happen outside the pool in fixed
// block order, so results never depend on the worker count.
class ThreadPool {
 public:
  static ThreadPool& instance() {
    static ThreadPool pool(env_threads());
    return pool;
  }

  static int env_threads() {
    if (const char* e = std::getenv("CPINN_THREADS")) {
      const int n = std::atoi(e);
      if (n >= 1) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
  }

  int size() const { return static_cast<int>(workers_.size()) + 1; }  // + calling thread

  // fn(block, tid) with tid in [0, size()).
  void parallel_blocks(std::size_t nblocks, const std::function<void(std::size_t, int)>& fn) {
    if (nblocks == 0) return;
    if (size() == 1 || nblocks == 1) {
      for (std::size_t b = 0; b < nblocks; ++b) fn(b, 0);
      return;
    }
    std::unique_lock lock(mu_);
    job_ = &fn;
    next_ = 0;
    end_ = nblocks;
    pending_ = static_cast<int>(workers_.size());
    ++generation_;
    cv_.notify_all();
    lock.unlock();

    run_worker(0);  // calling thread participates as tid 0

    lock.lock();
    done_cv_.wait(lock, [&] { return pending_ == 0; });
    job_ = nullptr;
  }

  ~ThreadPool() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
      cv_.notify_all();
    }
    for (auto& t : workers_) t.join();
  }

 private:
  explicit ThreadPool(int n) {
    for (int i = 1; i < n; ++i)
      workers_.emplace_back([this, i] { worker_loop(i); });
  }

  void worker_loop(int tid) {
    std::uint64_t seen = 0;
    for (;;) {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      lock.unlock();
      run_worker(tid);
      lock.lock();
      if (--pending_ == 0) done_cv_.notify_one();
    }
  }

  void run_worker(int tid) {
    const auto* job = job_;
    if (!job) return;
    for (;;) {
      const std::size_t b = next_.fetch_add(1, std::memory_order_relaxed);
      if (b >= end_) break;
      (*job)(b, tid);
    }
  }

  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable cv_, done_cv_;
  const std::function<void(std::size_t, int)>* job_ = nullptr;
  std::atomic<std::size_t> next_{0};
  std::size_t end_ = 0;
  int pending_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
};

}  // namespace cpinn
