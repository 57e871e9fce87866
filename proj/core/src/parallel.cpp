#include "mcdiv/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace mcdiv {

unsigned default_workers() {
  if (const char* env = std::getenv("MCDIV_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_chunks(std::size_t count, std::size_t chunks, unsigned workers,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  if (count == 0) return;
  chunks = std::clamp<std::size_t>(chunks, 1, count);
  auto bounds = [&](std::size_t c) { return count * c / chunks; };
  if (workers <= 1 || chunks == 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(bounds(c), bounds(c + 1), c);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) {
      try {
        body(bounds(c), bounds(c + 1), c);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const auto n = std::min<std::size_t>(workers, chunks);
    for (std::size_t w = 1; w < n; ++w) pool.emplace_back(run);
    run();
  }
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t mix_seed(std::uint64_t value) noexcept {
  value += 0x9e3779b97f4a7c15ULL;
  value = (value ^ (value >> 30)) * 0xbf58476d1ce4e5b9ULL;
  value = (value ^ (value >> 27)) * 0x94d049bb133111ebULL;
  return value ^ (value >> 31);
}

}  // namespace mcdiv
