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

// Dense row-major GEMM kernels used by the tensor engine.
//
// The parallel kernels split work across output rows only, so each output
// element is accumulated in the same order regardless of thread count and the
// results are bit-identical to a single-threaded run. gemm_reference() is the
// plain triple loop kept for tests and benchmarks.

#pragma once

#include <cstddef>

namespace arionet::kernels {

/// C[m x n] (+)= A[m x k] * B[k x n]
template <typename T>
void gemm_nn(const T* a, const T* b, T* c, std::size_t m, std::size_t k,
             std::size_t n, bool accumulate);

/// C[k x n] (+)= A^T * B with A[m x k], B[m x n]
template <typename T>
void gemm_tn(const T* a, const T* b, T* c, std::size_t m, std::size_t k,
             std::size_t n, bool accumulate);

/// C[m x n] (+)= A * B^T with A[m x k], B[n x k]
template <typename T>
void gemm_nt(const T* a, const T* b, T* c, std::size_t m, std::size_t k,
             std::size_t n, bool accumulate);

/// Serial triple loop. Shapes follow the logical product op(A) * op(B) where
/// op(A) is m x k and op(B) is k x n.
template <typename T>
void gemm_reference(const T* a, const T* b, T* c, std::size_t m, std::size_t k,
                    std::size_t n, bool trans_a, bool trans_b, bool accumulate);

/// Caps OpenMP worker threads. Values < 1 are ignored.
void set_num_threads(int n);

/// Applies ARIONET_THREADS from the environment, if set. Returns the value
/// applied, or 0 if the variable is absent or invalid.
int apply_thread_env();

int max_threads();

}  // namespace arionet::kernels
