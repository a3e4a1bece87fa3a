#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <future>
#include <string>
#include <thread>
#include <vector>

namespace starlb {

// Worker count from STARLB_THREADS; defaults to 1.
inline unsigned worker_count() {
  const char* env = std::getenv("STARLB_THREADS");
  if (env == nullptr) return 1;
  try {
    int n = std::stoi(env);
    if (n <= 0) return std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(n);
  } catch (const std::exception&) {
    return 1;
  }
}

// Evaluates fn(0..n-1); results keep index order regardless of scheduling.
template <typename R>
std::vector<R> parallel_map(std::size_t n, const std::function<R(std::size_t)>& fn, unsigned workers = worker_count()) {
  std::vector<R> out(n);
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::future<void>> jobs;
  for (unsigned w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
    }));
  for (auto& j : jobs) j.get();
  return out;
}

}  // namespace starlb
