#include "novsh/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace novsh {

namespace {
std::atomic<int> g_worker_threads{0};
}

void set_worker_threads(int n) { g_worker_threads.store(n < 0 ? 0 : n); }

int worker_threads() {
  int n = g_worker_threads.load();
  if (n > 0) return n;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(size_t n, const std::function<void(size_t, size_t)>& fn) {
  if (n == 0) return;
  int nt = worker_threads();
  if (nt <= 1 || n < 2048) {
    fn(0, n);
    return;
  }
  size_t chunk = (n + static_cast<size_t>(nt) - 1) / static_cast<size_t>(nt);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    size_t b = static_cast<size_t>(t) * chunk;
    if (b >= n) break;
    size_t e = std::min(n, b + chunk);
    pool.emplace_back(fn, b, e);
  }
  for (auto& th : pool) th.join();
}

double pairwise_sum(const double* data, size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  size_t h = n / 2;
  return pairwise_sum(data, h) + pairwise_sum(data + h, n - h);
}

}  // namespace novsh
