// Deterministic parallel Monte Carlo driver.
//
// Paths are mapped over fixed-size chunks; each chunk accumulates its partial
// sums serially in path order, and chunk partials are combined in chunk order.
// The OpenMP and serial execution paths therefore produce bit-identical
// results for any thread count.
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace shotdown {

enum class Exec { kSerial, kParallel };

struct Estimate {
  double value = 0;
  double stderr_value = 0;
  std::size_t n = 0;
  std::string bias_note;
};

struct MapReduceResult {
  std::vector<double> sum;    // per output
  std::vector<double> sumsq;  // per output
  std::size_t n = 0;

  double mean(std::size_t k) const { return sum[k] / static_cast<double>(n); }
  double stderr_of(std::size_t k) const {
    if (n < 2) return 0;
    double m = mean(k);
    double var = (sumsq[k] - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
    return var > 0 ? std::sqrt(var / static_cast<double>(n)) : 0.0;
  }
  Estimate estimate(std::size_t k) const { return {mean(k), stderr_of(k), n, {}}; }
};

inline constexpr std::size_t kChunkSize = 1024;

// fn(i, out) fills the k_outputs contributions of path i (out arrives zeroed).
template <class Fn>
MapReduceResult map_reduce_paths(std::size_t n, std::size_t k_outputs, Exec exec, Fn&& fn) {
  const std::size_t n_chunks = (n + kChunkSize - 1) / kChunkSize;
  std::vector<double> chunk_sum(n_chunks * k_outputs, 0.0);
  std::vector<double> chunk_sumsq(n_chunks * k_outputs, 0.0);

  auto run_chunk = [&](std::size_t c) {
    std::vector<double> out(k_outputs);
    double* cs = chunk_sum.data() + c * k_outputs;
    double* cq = chunk_sumsq.data() + c * k_outputs;
    const std::size_t lo = c * kChunkSize, hi = std::min(n, lo + kChunkSize);
    for (std::size_t i = lo; i < hi; ++i) {
      std::fill(out.begin(), out.end(), 0.0);
      fn(i, std::span<double>(out));
      for (std::size_t k = 0; k < k_outputs; ++k) {
        cs[k] += out[k];
        cq[k] += out[k] * out[k];
      }
    }
  };

  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long c = 0; c < static_cast<long long>(n_chunks); ++c)
      run_chunk(static_cast<std::size_t>(c));
  } else {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
  }

  MapReduceResult r;
  r.n = n;
  r.sum.assign(k_outputs, 0.0);
  r.sumsq.assign(k_outputs, 0.0);
  for (std::size_t c = 0; c < n_chunks; ++c)
    for (std::size_t k = 0; k < k_outputs; ++k) {
      r.sum[k] += chunk_sum[c * k_outputs + k];
      r.sumsq[k] += chunk_sumsq[c * k_outputs + k];
    }
  return r;
}

}  // namespace shotdown
