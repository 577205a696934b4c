#pragma once

// Deterministic data-parallel helpers.
//
// Every kernel in the library is written as an indexed map over independent
// work items followed by a reduction in index order. The OpenMP path only
// changes who computes each item, so the serial reference and the parallel
// kernel produce bit-identical results regardless of the thread count.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include <omp.h>

namespace kepshear {

enum class Exec { serial, parallel };

/// Caps the number of OpenMP workers (0 leaves the runtime default).
inline void set_thread_limit(int n) {
  if (n > 0) omp_set_num_threads(n);
}

inline int thread_limit() { return omp_get_max_threads(); }

/// out[i] = fn(i) for i in [0, n).
template <class T, class Fn>
std::vector<T> indexed_map(std::size_t n, Exec exec, Fn&& fn) {
  std::vector<T> out(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
  }
  return out;
}

/// Fixed chunking used by every Monte-Carlo kernel. Chunk boundaries depend
/// only on the sample count, never on the thread count.
inline constexpr std::size_t kChunk = 4096;

struct ChunkRange {
  std::size_t index;
  std::size_t begin;
  std::size_t end;
};

inline std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }

inline ChunkRange chunk_range(std::size_t n, std::size_t c) {
  const std::size_t b = c * kChunk;
  return {c, b, b + kChunk < n ? b + kChunk : n};
}

/// Per-chunk generator derived from (seed, stream, chunk).
inline std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(chunk),
                    static_cast<std::uint32_t>(chunk >> 32), 0x9e3779b9u};
  return std::mt19937_64(seq);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace kepshear
