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
// OpenMP kernels against their serial reference implementations.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "arionet/dsp.hpp"
#include "arionet/kernels.hpp"

namespace {

using namespace arionet;

std::vector<float> random_floats(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

void BM_GemmParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_floats(n * n, 1), b = random_floats(n * n, 2);
  std::vector<float> c(n * n);
  for (auto _ : state) {
    kernels::gemm_nn(a.data(), b.data(), c.data(), n, n, n, false);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n * n));
}

void BM_GemmReference(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_floats(n * n, 1), b = random_floats(n * n, 2);
  std::vector<float> c(n * n);
  for (auto _ : state) {
    kernels::gemm_reference(a.data(), b.data(), c.data(), n, n, n, false, false, false);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n * n));
}

dsp::Waveform chirp(double seconds) {
  dsp::Waveform w;
  w.sample_rate = 22050;
  const auto n = static_cast<std::size_t>(seconds * w.sample_rate);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / w.sample_rate;
    w.samples.push_back(0.5 * std::sin(2.0 * M_PI * (1000.0 + 1500.0 * t) * t));
  }
  return w;
}

void BM_StftParallel(benchmark::State& state) {
  const auto w = chirp(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dsp::stft(w, 2048, 512));
}

void BM_StftSerial(benchmark::State& state) {
  const auto w = chirp(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dsp::stft_serial(w, 2048, 512));
}

}  // namespace

BENCHMARK(BM_GemmParallel)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_GemmReference)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_StftParallel)->Arg(3)->Arg(30);
BENCHMARK(BM_StftSerial)->Arg(3)->Arg(30);

BENCHMARK_MAIN();
