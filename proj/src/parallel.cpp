#include "wordconf/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace wordconf::par {
namespace {

std::atomic<std::size_t> g_override{0};

std::size_t env_workers() {
  if (const char* env = std::getenv("WORDCONF_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return std::min<long>(v, 256);
  }
  return 1;
}

}  // namespace

std::size_t worker_count() {
  const std::size_t o = g_override.load(std::memory_order_relaxed);
  return o > 0 ? o : env_workers();
}

void set_worker_count(std::size_t n) {
  g_override.store(n, std::memory_order_relaxed);
}

void for_each_chunk(std::size_t n,
                    const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    body(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        if (!failed.exchange(true)) first_error = std::current_exception();
      }
    });
  }
  for (std::thread& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace wordconf::par
