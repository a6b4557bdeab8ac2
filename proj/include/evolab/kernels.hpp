#pragma once

// Data-parallel loop kernels (OpenMP) with serial twins.
//
// Every kernel is deterministic and thread-count independent:
//  * reductions are max-reductions (exact in floating point, order-free), and
//  * ordered folds split the index range into a fixed number of chunks, so the
//    grouping of the non-commutative products never depends on the schedule.
// Randomized kernels derive one RNG per index from (seed, index), never from
// thread id, so sample i is the same no matter how the loop is carved up.

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace evolab::kernels {

enum class Exec { serial, parallel };

/// SplitMix64 step; good avalanche, used to expand (seed, index) into streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Engine for the `index`-th sample of logical stream `stream` under `seed`.
/// Identical across serial/parallel execution and across thread counts.
inline std::mt19937_64 indexed_rng(std::uint64_t seed, std::uint64_t index,
                                   std::uint64_t stream = 0) {
  std::uint64_t s = splitmix64(seed ^ splitmix64(index + 0x51ed27f4a1b3c5d7ULL));
  s = splitmix64(s ^ splitmix64(stream + 0xd6e8feb86659fd93ULL));
  return std::mt19937_64(s);
}

/// max_{0 <= i < count} f(i).  Returns -inf for an empty range.
template <class F>
double max_over(std::int64_t count, F&& f, Exec exec) {
  double best = -std::numeric_limits<double>::infinity();
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < count; ++i) best = std::max(best, f(i));
    return best;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : best)
#endif
  for (std::int64_t i = 0; i < count; ++i) best = std::max(best, f(i));
  return best;
}

/// argmax companion to max_over: returns {max value, smallest attaining index}.
template <class F>
std::pair<double, std::int64_t> argmax_over(std::int64_t count, F&& f, Exec exec) {
  double best = -std::numeric_limits<double>::infinity();
  std::int64_t arg = -1;
  if (exec == Exec::parallel) {
#ifdef _OPENMP
    std::vector<double> vals(static_cast<std::size_t>(count > 0 ? count : 0));
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) vals[static_cast<std::size_t>(i)] = f(i);
    for (std::int64_t i = 0; i < count; ++i) {
      if (vals[static_cast<std::size_t>(i)] > best) {
        best = vals[static_cast<std::size_t>(i)];
        arg = i;
      }
    }
    return {best, arg};
#endif
  }
  for (std::int64_t i = 0; i < count; ++i) {
    double v = f(i);
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  return {best, arg};
}

/// Left fold init * factor(0) * ... * factor(count-1) for an associative
/// `combine`.  The range is split into `chunks` fixed pieces whose partial
/// products are formed independently (possibly in parallel) and then folded
/// left to right, so the result does not depend on the thread count.  The
/// serial path uses the same chunking to keep both paths bit-identical.
template <class T, class Factor, class Combine>
T ordered_fold(std::int64_t count, Factor&& factor, Combine&& combine, T init,
               Exec exec, int chunks = 64) {
  if (count <= 0) return init;
  if (chunks < 1) chunks = 1;
  const std::int64_t k = std::min<std::int64_t>(chunks, count);
  std::vector<T> partial(static_cast<std::size_t>(k), init);
  auto chunk_fold = [&](std::int64_t c) {
    const std::int64_t lo = count * c / k;
    const std::int64_t hi = count * (c + 1) / k;
    T acc = factor(lo);
    for (std::int64_t i = lo + 1; i < hi; ++i) acc = combine(acc, factor(i));
    partial[static_cast<std::size_t>(c)] = acc;
  };
  if (exec == Exec::serial) {
    for (std::int64_t c = 0; c < k; ++c) chunk_fold(c);
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t c = 0; c < k; ++c) chunk_fold(c);
  }
  T acc = std::move(init);
  for (std::int64_t c = 0; c < k; ++c) acc = combine(acc, partial[static_cast<std::size_t>(c)]);
  return acc;
}

inline void set_jobs(int jobs) {
#ifdef _OPENMP
  if (jobs > 0) omp_set_num_threads(jobs);
#else
  (void)jobs;
#endif
}

}  // namespace evolab::kernels
