#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <stdexcept>

#include "causal_resample/worker_pool.hpp"

using namespace causal_resample;

TEST_CASE("every index runs exactly once") {
  for (int workers : {1, 3, 8}) {
    WorkerPool pool(workers);
    CHECK(pool.size() == workers);
    std::vector<std::atomic<int>> seen(1000);
    pool.parallel_for(seen.size(), [&](std::size_t i) { seen[i].fetch_add(1); });
    for (const auto& s : seen) CHECK(s.load() == 1);
    pool.parallel_for(0, [](std::size_t) { FAIL("body called for an empty batch"); });
  }
}

TEST_CASE("nested batches do not deadlock") {
  WorkerPool pool(2);
  std::atomic<int> total{0};
  pool.parallel_for(8, [&](std::size_t) {
    pool.parallel_for(16, [&](std::size_t) { total.fetch_add(1); });
  });
  CHECK(total.load() == 128);
}

TEST_CASE("exceptions surface after the batch drains") {
  WorkerPool pool(4);
  std::atomic<int> ran{0};
  CHECK_THROWS_AS(pool.parallel_for(100,
                                    [&](std::size_t i) {
                                      ran.fetch_add(1);
                                      if (i == 7) throw std::runtime_error("boom");
                                    }),
                  std::runtime_error);
  CHECK(ran.load() == 100);
  std::atomic<int> after{0};
  pool.parallel_for(10, [&](std::size_t) { after.fetch_add(1); });
  CHECK(after.load() == 10);
}

TEST_CASE("environment override") {
  ::setenv("CAUSAL_RESAMPLE_WORKERS", "3", 1);
  CHECK(WorkerPool::default_workers() == 3);
  ::unsetenv("CAUSAL_RESAMPLE_WORKERS");
  CHECK(WorkerPool::default_workers() >= 1);
}
