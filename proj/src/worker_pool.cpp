#include "causal_resample/worker_pool.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <memory>
#include <string>

namespace causal_resample {

namespace {

struct Batch {
  std::size_t count = 0;
  const std::function<void(std::size_t)>* body = nullptr;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex mutex;
  std::condition_variable finished;
  std::exception_ptr error;

  // Claims and runs items until none remain.
  void drain() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        (*body)(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
      }
      if (done.fetch_add(1) + 1 == count) {
        std::lock_guard lock(mutex);
        finished.notify_all();
      }
    }
  }
};

}  // namespace

WorkerPool::WorkerPool(int workers) {
  const int extra = workers > 1 ? workers - 1 : 0;
  threads_.reserve(extra);
  for (int i = 0; i < extra; ++i) threads_.emplace_back([this] { worker_loop(); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::worker_loop() {
  for (;;) {
    std::function<void()> task;
    {
      std::unique_lock lock(mutex_);
      cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (stopping_ && queue_.empty()) return;
      task = std::move(queue_.front());
      queue_.pop_front();
    }
    task();
  }
}

void WorkerPool::parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  auto batch = std::make_shared<Batch>();
  batch->count = count;
  batch->body = &body;

  const std::size_t helpers = std::min(threads_.size(), count - 1);
  if (helpers > 0) {
    {
      std::lock_guard lock(mutex_);
      for (std::size_t h = 0; h < helpers; ++h) queue_.emplace_back([batch] { batch->drain(); });
    }
    cv_.notify_all();
  }
  batch->drain();
  {
    std::unique_lock lock(batch->mutex);
    batch->finished.wait(lock, [&] { return batch->done.load() == count; });
  }
  if (batch->error) std::rethrow_exception(batch->error);
}

int WorkerPool::default_workers() {
  if (const char* env = std::getenv("CAUSAL_RESAMPLE_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace causal_resample
