#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace mcdiv {

/// Worker count from MCDIV_WORKERS, else the hardware concurrency.
unsigned default_workers();

/// Splits [0, count) into contiguous chunks and runs `body(begin, end, chunk)`
/// on up to `workers` threads.  Chunk boundaries depend only on `count` and
/// `chunks`, never on the worker count.
void parallel_chunks(std::size_t count, std::size_t chunks, unsigned workers,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

/// SplitMix64 finalizer; maps (seed, stream...) to well-separated seeds.
std::uint64_t mix_seed(std::uint64_t value) noexcept;

template <typename... Streams>
std::uint64_t derive_seed(std::uint64_t seed, Streams... streams) noexcept {
  std::uint64_t s = mix_seed(seed);
  ((s = mix_seed(s ^ (static_cast<std::uint64_t>(streams) + 0x9e3779b97f4a7c15ULL))), ...);
  return s;
}

}  // namespace mcdiv
