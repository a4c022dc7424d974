#ifndef CAUSAL_RESAMPLE_WORKER_POOL_HPP
#define CAUSAL_RESAMPLE_WORKER_POOL_HPP

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace causal_resample {

// Fixed set of threads serving parallel_for batches. The calling thread also
// works on its own batch, so parallel_for may be nested inside a task without
// deadlock. A pool of size 1 runs everything inline on the caller.
class WorkerPool {
 public:
  explicit WorkerPool(int workers);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  int size() const { return static_cast<int>(threads_.size()) + 1; }

  // Runs body(i) for i in [0, count). The first exception thrown by a body is
  // rethrown after the batch has drained.
  void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

  // Worker count from the environment override, else the hardware.
  static int default_workers();

 private:
  void worker_loop();

  std::vector<std::thread> threads_;
  std::deque<std::function<void()>> queue_;
  std::mutex mutex_;
  std::condition_variable cv_;
  bool stopping_ = false;
};

}  // namespace causal_resample

#endif  // CAUSAL_RESAMPLE_WORKER_POOL_HPP
