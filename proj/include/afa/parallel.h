// Copyright 2026 The AFA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef AFA_PARALLEL_H_
#define AFA_PARALLEL_H_

#include <algorithm>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

// Deterministic block-parallel reductions. Every reduction runs over fixed
// 4096-element blocks whose partial sums are combined in block order, so the
// OpenMP path and the serial reference path produce bit-identical results
// for any thread count.

namespace afa {

// Process-wide switch between the OpenMP kernels and the serial reference
// path. Tests flip it to compare the two implementations; benchmarks time
// both.
void SetParallelEnabled(bool enabled);
bool ParallelEnabled();

namespace internal {

inline constexpr std::size_t kParallelBlock = 4096;

}  // namespace internal

// Sum of term(i) for i in [0, n). T is double or std::complex<double>.
template <typename T, typename TermFn>
T BlockSum(std::size_t n, const TermFn& term) {
  const std::size_t num_blocks =
      (n + internal::kParallelBlock - 1) / internal::kParallelBlock;
  if (num_blocks <= 1) {
    T acc{};
    for (std::size_t i = 0; i < n; ++i) acc += term(i);
    return acc;
  }
  std::vector<T> partial(num_blocks, T{});
  const bool parallel = ParallelEnabled();
#ifdef AFA_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (parallel && num_blocks > 1)
#endif
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(num_blocks);
       ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * internal::kParallelBlock;
    const std::size_t hi = std::min(n, lo + internal::kParallelBlock);
    T acc{};
    for (std::size_t i = lo; i < hi; ++i) acc += term(i);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  (void)parallel;
  T total{};
  for (const T& p : partial) total += p;
  return total;
}

// Runs body(i) for i in [0, n) with no ordering guarantees between indices.
template <typename BodyFn>
void ParallelFor(std::size_t n, const BodyFn& body) {
  const bool parallel = ParallelEnabled();
#ifdef AFA_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (parallel && n > 1)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    body(static_cast<std::size_t>(i));
  }
  (void)parallel;
}

// Maximum of term(i) for i in [0, n); order independent.
template <typename TermFn>
double BlockMax(std::size_t n, const TermFn& term) {
  const std::size_t num_blocks =
      (n + internal::kParallelBlock - 1) / internal::kParallelBlock;
  std::vector<double> partial(num_blocks,
                              -std::numeric_limits<double>::infinity());
  const bool parallel = ParallelEnabled();
#ifdef AFA_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (parallel && num_blocks > 1)
#endif
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(num_blocks);
       ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * internal::kParallelBlock;
    const std::size_t hi = std::min(n, lo + internal::kParallelBlock);
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, term(i));
    partial[static_cast<std::size_t>(b)] = m;
  }
  (void)parallel;
  double total = -std::numeric_limits<double>::infinity();
  for (double p : partial) total = std::max(total, p);
  return total;
}

}  // namespace afa

#endif  // AFA_PARALLEL_H_
