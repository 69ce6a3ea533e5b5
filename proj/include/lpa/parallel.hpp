#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace lpa {

/// Number of worker threads; 0 means one per hardware thread.
struct Execution {
  unsigned threads = 0;

  unsigned resolved() const noexcept {
    if (threads != 0) {
      return threads;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
  }
};

/// Calls body(i) for every i in [0, n). Each index is an independent work
/// unit whose result the body stores by index, so output never depends on
/// scheduling. If several bodies throw, the exception of the lowest index
/// is rethrown.
template <class Body>
void parallel_for(std::size_t n, const Execution& exec, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(exec.resolved(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      body(i);
    }
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back(worker);
    }
  }
  for (auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

}  // namespace lpa
