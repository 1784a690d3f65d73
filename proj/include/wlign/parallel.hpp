#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace wlign {

inline int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(i) for i in [0,count). Each index must touch only its own output
// slot; results are then independent of the degree of parallelism.
template <class Fn>
void parallel_for(std::uint64_t count, int jobs, Fn&& fn) {
  jobs = resolve_jobs(jobs);
  if (jobs <= 1 || count < 2) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::uint64_t workers = std::min<std::uint64_t>(jobs, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::uint64_t w = 0; w < workers; ++w) {
    std::uint64_t lo = count * w / workers, hi = count * (w + 1) / workers;
    pool.emplace_back([lo, hi, &fn] {
      for (std::uint64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace wlign
