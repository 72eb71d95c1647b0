#ifndef MAGSURF_PARALLEL_HPP
#define MAGSURF_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace magsurf {

// Run fn(i) for i in [0, n). Work is claimed by atomic counter; results must
// be written by index so the output is independent of scheduling.
template <typename Fn>
void parallel_for(size_t n, int threads, Fn&& fn) {
  if (threads < 1) threads = 1;
  if (threads == 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int nt = static_cast<int>(std::min<size_t>(threads, n));
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace magsurf

#endif
