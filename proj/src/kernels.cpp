// Copyright 2026 The arionet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "arionet/kernels.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>
#include <vector>

namespace arionet::kernels {

namespace {

// Below this many multiply-adds the fork/join cost dominates.
constexpr std::size_t kParallelThreshold = 1u << 15;

}  // namespace

template <typename T>
void gemm_nn(const T* a, const T* b, T* c, std::size_t m, std::size_t k,
             std::size_t n, bool accumulate) {
  const auto rows = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static) if (m * k * n > kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    T* __restrict crow = c + static_cast<std::size_t>(i) * n;
    if (!accumulate) {
      for (std::size_t j = 0; j < n; ++j) crow[j] = T(0);
    }
    const T* arow = a + static_cast<std::size_t>(i) * k;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = arow[p];
      const T* __restrict brow = b + p * n;
#pragma omp simd
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <typename T>
void gemm_tn(const T* a, const T* b, T* c, std::size_t m, std::size_t k,
             std::size_t n, bool accumulate) {
  const auto out_rows = static_cast<std::ptrdiff_t>(k);
#pragma omp parallel for schedule(static) if (m * k * n > kParallelThreshold)
  for (std::ptrdiff_t p = 0; p < out_rows; ++p) {
    T* __restrict crow = c + static_cast<std::size_t>(p) * n;
    if (!accumulate) {
      for (std::size_t j = 0; j < n; ++j) crow[j] = T(0);
    }
    for (std::size_t i = 0; i < m; ++i) {
      const T av = a[i * k + static_cast<std::size_t>(p)];
      const T* __restrict brow = b + i * n;
#pragma omp simd
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <typename T>
void gemm_nt(const T* a, const T* b, T* c, std::size_t m, std::size_t k,
             std::size_t n, bool accumulate) {
  // Transposing B (n x k) into k x n turns this into the row-streaming NN form.
  std::vector<T> bt(k * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t p = 0; p < k; ++p) bt[p * n + j] = b[j * k + p];
  }
  gemm_nn(a, bt.data(), c, m, k, n, accumulate);
}

template <typename T>
void gemm_reference(const T* a, const T* b, T* c, std::size_t m, std::size_t k,
                    std::size_t n, bool trans_a, bool trans_b, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      T acc = accumulate ? c[i * n + j] : T(0);
      for (std::size_t p = 0; p < k; ++p) {
        const T av = trans_a ? a[p * m + i] : a[i * k + p];
        const T bv = trans_b ? b[j * k + p] : b[p * n + j];
        acc += av * bv;
      }
      c[i * n + j] = acc;
    }
  }
}

void set_num_threads(int n) {
  if (n >= 1) omp_set_num_threads(n);
}

int apply_thread_env() {
  const char* env = std::getenv("ARIONET_THREADS");
  if (env == nullptr) return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) return 0;
  set_num_threads(static_cast<int>(v));
  return static_cast<int>(v);
}

int max_threads() { return omp_get_max_threads(); }

#define ARIONET_INSTANTIATE_GEMM(T)                                               \
  template void gemm_nn<T>(const T*, const T*, T*, std::size_t, std::size_t,      \
                           std::size_t, bool);                                    \
  template void gemm_tn<T>(const T*, const T*, T*, std::size_t, std::size_t,      \
                           std::size_t, bool);                                    \
  template void gemm_nt<T>(const T*, const T*, T*, std::size_t, std::size_t,      \
                           std::size_t, bool);                                    \
  template void gemm_reference<T>(const T*, const T*, T*, std::size_t,            \
                                  std::size_t, std::size_t, bool, bool, bool);

ARIONET_INSTANTIATE_GEMM(float)
ARIONET_INSTANTIATE_GEMM(double)

#undef ARIONET_INSTANTIATE_GEMM

}  // namespace arionet::kernels
