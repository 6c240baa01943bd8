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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "arionet/dsp.hpp"
#include "arionet/errors.hpp"

namespace {

using namespace arionet;
using dsp::Complex;

constexpr double kPi = std::numbers::pi;

std::vector<Complex> naive_dft(const std::vector<Complex>& x) {
  const std::size_t n = x.size();
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = -2.0 * kPi * static_cast<double>(k * j % n) / static_cast<double>(n);
      acc += x[j] * Complex(std::cos(a), std::sin(a));
    }
    out[k] = acc;
  }
  return out;
}

double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

dsp::Waveform sine(double hz, double seconds, int sr, double amp = 0.5) {
  dsp::Waveform w;
  w.sample_rate = sr;
  w.samples.resize(static_cast<std::size_t>(seconds * sr));
  for (std::size_t n = 0; n < w.samples.size(); ++n) {
    w.samples[n] = amp * std::sin(2.0 * kPi * hz * static_cast<double>(n) / sr);
  }
  return w;
}

TEST(Fft, ImpulseIsFlat) {
  std::vector<Complex> x{1, 0, 0, 0};
  for (const auto& v : dsp::fft(x)) EXPECT_NEAR(std::abs(v - Complex(1, 0)), 0.0, 1e-15);
}

TEST(Fft, ConstantIsDcSpike) {
  std::vector<Complex> x{1, 1, 1, 1};
  const auto y = dsp::fft(x);
  EXPECT_NEAR(std::abs(y[0] - Complex(4, 0)), 0.0, 1e-15);
  for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(std::abs(y[k]), 0.0, 1e-15);
}

TEST(Fft, MatchesNaiveDftForEveryPowerOfTwo) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (std::size_t n = 1; n <= 1024; n *= 2) {
    std::vector<Complex> x(n);
    for (auto& v : x) v = Complex(g(rng), g(rng));
    EXPECT_LT(max_abs_diff(dsp::fft(x), naive_dft(x)), 1e-9) << "n=" << n;
  }
}

TEST(Fft, InverseRoundTrip) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<Complex> x(512);
  for (auto& v : x) v = Complex(g(rng), g(rng));
  EXPECT_LT(max_abs_diff(dsp::ifft(dsp::fft(x)), x), 1e-9);
}

TEST(Fft, RejectsNonPowerOfTwo) {
  std::vector<Complex> x(6);
  EXPECT_THROW(dsp::fft(x), InvalidArgument);
  std::vector<Complex> empty;
  EXPECT_THROW(dsp::fft(empty), InvalidArgument);
}

TEST(Stft, FrameCountAndShape) {
  EXPECT_EQ(dsp::frame_count(2048, 2048, 512), 1u);
  EXPECT_EQ(dsp::frame_count(4096, 2048, 512), 5u);
  EXPECT_EQ(dsp::frame_count(100, 2048, 512), 1u);
  const auto s = dsp::stft(sine(1000, 0.5, 22050), 2048, 512);
  EXPECT_EQ(s.bins(), 1025u);
  EXPECT_EQ(s.frames(), dsp::frame_count(11025, 2048, 512));
  for (std::size_t f = 1; f < s.bins(); ++f) EXPECT_GT(s.bin_freqs[f], s.bin_freqs[f - 1]);
}

TEST(Stft, ColumnMatchesDirectWindowedDft) {
  const auto w = sine(660, 0.2, 8000);
  const int n_fft = 256, hop = 64;
  const auto s = dsp::stft(w, n_fft, hop);
  const auto win = dsp::hann_window(n_fft);
  const std::size_t t = 7;
  std::vector<Complex> frame(n_fft);
  for (int n = 0; n < n_fft; ++n) frame[n] = w.samples[t * hop + n] * win[n];
  const auto ref = naive_dft(frame);
  for (std::size_t f = 0; f < s.bins(); ++f) {
    EXPECT_NEAR(s.magnitudes(f, t), std::abs(ref[f]), 1e-9);
  }
}

TEST(Stft, ParallelMatchesSerialExactly) {
  const auto w = sine(1234, 1.0, 22050);
  EXPECT_EQ(dsp::stft(w, 2048, 512).magnitudes, dsp::stft_serial(w, 2048, 512).magnitudes);
}

TEST(Stft, RejectsBadArguments) {
  EXPECT_THROW(dsp::stft(dsp::Waveform{}, 2048, 512), InvalidArgument);
  const auto w = sine(440, 0.1, 22050);
  EXPECT_THROW(dsp::stft(w, 1000, 512), InvalidArgument);
  EXPECT_THROW(dsp::stft(w, 1024, 0), InvalidArgument);
}

TEST(Hann, PeriodicWindow) {
  const auto w = dsp::hann_window(8);
  EXPECT_DOUBLE_EQ(w[0], 0.0);
  EXPECT_NEAR(w[4], 1.0, 1e-15);
  EXPECT_NEAR(w[2], 0.5, 1e-15);
  EXPECT_NEAR(w[6], 0.5, 1e-15);
}

TEST(Mel, HtkScaleKnownValues) {
  EXPECT_NEAR(dsp::hz_to_mel(700.0), 2595.0 * std::log10(2.0), 1e-9);
  EXPECT_NEAR(dsp::hz_to_mel(0.0), 0.0, 1e-12);
  for (double hz : {50.0, 440.0, 8000.0}) {
    EXPECT_NEAR(dsp::mel_to_hz(dsp::hz_to_mel(hz)), hz, 1e-9);
  }
}

TEST(Mel, FilterbankTrianglesPeakAtOneAndAreNonNegative) {
  const auto fb = dsp::mel_filterbank(40, 2048, 22050);
  EXPECT_EQ(fb.rows(), 40u);
  EXPECT_EQ(fb.cols(), 1025u);
  for (std::size_t m = 0; m < fb.rows(); ++m) {
    double peak = 0.0;
    for (double v : fb.row(m)) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      peak = std::max(peak, v);
    }
    EXPECT_GT(peak, 0.0);
  }
}

TEST(Mel, EmptyBandIsAnError) {
  EXPECT_THROW(dsp::mel_filterbank(512, 256, 22050), InvalidArgument);
}

TEST(Mel, SpectrogramIsFilterbankTimesPower) {
  const auto s = dsp::stft(sine(880, 0.3, 22050), 1024, 256);
  const auto fb = dsp::mel_filterbank(32, 1024, 22050);
  const auto mel = dsp::mel_spectrogram(s, 32);
  for (std::size_t t = 0; t < s.frames(); t += 3) {
    for (std::size_t m = 0; m < 32; ++m) {
      double ref = 0.0;
      for (std::size_t f = 0; f < s.bins(); ++f) {
        ref += fb(m, f) * s.magnitudes(f, t) * s.magnitudes(f, t);
      }
      EXPECT_NEAR(mel(m, t), ref, 1e-9 * std::max(1.0, ref));
    }
  }
}

TEST(Mfcc, MatchesDirectOrthonormalDct) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  Matrix<double> mel(20, 4);
  for (auto& v : mel.data()) v = u(rng);
  const auto c = dsp::mfcc(mel, 13);
  const double n = 20;
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t k = 0; k < 13; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < 20; ++i) {
        acc += std::log(mel(i, t) + 1e-10) * std::cos(kPi * k * (i + 0.5) / n);
      }
      acc *= k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      EXPECT_NEAR(c(k, t), acc, 1e-12);
    }
  }
}

TEST(Mfcc, RejectsBadShapes) {
  Matrix<double> mel(10, 3, 1.0);
  EXPECT_THROW(dsp::mfcc(mel, 13), InvalidArgument);
  EXPECT_THROW(dsp::mfcc(Matrix<double>(), 13), InvalidArgument);
  mel(0, 0) = -1.0;
  EXPECT_THROW(dsp::mfcc(mel, 5), InvalidArgument);
}

TEST(Delta, ConstantSequenceGivesExactZeros) {
  Matrix<double> seq(13, 9, 3.7);
  const auto d = dsp::delta(seq);
  for (double v : d.data()) EXPECT_EQ(v, 0.0);
  const auto m = dsp::mfcc_with_deltas(Matrix<double>(20, 9, 0.25), 13);
  for (double v : m.delta.data()) EXPECT_EQ(v, 0.0);
  for (double v : m.delta2.data()) EXPECT_EQ(v, 0.0);
}

TEST(Delta, LinearRampHasConstantVelocityAndZeroAcceleration) {
  Matrix<double> seq(1, 6);
  for (std::size_t t = 0; t < 6; ++t) seq(0, t) = 2.0 * t + 1.0;
  const auto d = dsp::delta(seq);
  const auto dd = dsp::delta(d);
  EXPECT_EQ(d(0, 0), 0.0);
  for (std::size_t t = 1; t < 6; ++t) EXPECT_EQ(d(0, t), 2.0);
  for (std::size_t t = 2; t < 6; ++t) EXPECT_EQ(dd(0, t), 0.0);
}

TEST(Spectral, CentroidOfPureToneIsNearItsFrequency) {
  const auto s = dsp::stft(sine(2000, 0.5, 22050), 2048, 512);
  for (double c : dsp::spectral_centroid(s)) EXPECT_NEAR(c, 2000.0, 60.0);
}

TEST(Spectral, HandSpectrumOracles) {
  dsp::Spectrogram s;
  s.magnitudes = Matrix<double>(4, 1, std::vector<double>{1, 0, 3, 0});
  s.bin_freqs = {0, 100, 200, 300};
  s.sample_rate = 600;
  s.n_fft = 6;
  EXPECT_DOUBLE_EQ(dsp::spectral_centroid(s)[0], 150.0);
  EXPECT_NEAR(dsp::spectral_bandwidth(s)[0], std::sqrt((150.0 * 150 + 3 * 50.0 * 50) / 4.0),
              1e-12);
  EXPECT_DOUBLE_EQ(dsp::spectral_rolloff(s, 0.85)[0], 200.0);
  EXPECT_DOUBLE_EQ(dsp::spectral_rolloff(s, 0.2)[0], 0.0);
  EXPECT_THROW(dsp::spectral_rolloff(s, 0.0), InvalidArgument);
}

TEST(Spectral, SilentFrameGivesZeros) {
  dsp::Spectrogram s;
  s.magnitudes = Matrix<double>(3, 2, 0.0);
  s.bin_freqs = {0, 10, 20};
  EXPECT_EQ(dsp::spectral_centroid(s)[1], 0.0);
  EXPECT_EQ(dsp::spectral_bandwidth(s)[1], 0.0);
  EXPECT_EQ(dsp::spectral_rolloff(s)[1], 0.0);
}

TEST(Energy, RmsAndZcr) {
  std::vector<double> a{1, -1, 1, -1};
  EXPECT_DOUBLE_EQ(dsp::rms(a), 1.0);
  EXPECT_DOUBLE_EQ(dsp::zcr(a), 1.0);
  std::vector<double> b{3, 4, 0, 0};
  EXPECT_DOUBLE_EQ(dsp::rms(b), 2.5);
  EXPECT_DOUBLE_EQ(dsp::zcr(b), 0.0);
  EXPECT_THROW(dsp::rms(std::vector<double>{}), InvalidArgument);
  EXPECT_THROW(dsp::zcr(std::vector<double>{1.0}), InvalidArgument);
}

TEST(Chroma, PitchClassMapping) {
  EXPECT_EQ(dsp::pitch_class(440.0), 9);
  EXPECT_EQ(dsp::pitch_class(880.0), 9);
  EXPECT_EQ(dsp::pitch_class(261.6256), 0);
  EXPECT_EQ(dsp::pitch_class(466.1638), 10);
}

TEST(Chroma, SineAt440PeaksOnA) {
  const auto s = dsp::stft(sine(440, 2.0, 22050), 2048, 512);
  const auto c = dsp::chromagram(s);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < c.frames(); ++t) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < 12; ++k) {
      if (c.energies(k, t) > c.energies(best, t)) best = k;
    }
    hits += best == 9;
  }
  EXPECT_GE(static_cast<double>(hits), 0.95 * static_cast<double>(c.frames()));
}

TEST(Chroma, ColumnsAreMaxNormalizedAndNonNegative) {
  const auto s = dsp::stft(sine(700, 0.5, 22050), 2048, 512);
  const auto c = dsp::chromagram(s);
  EXPECT_TRUE(c.normalized);
  EXPECT_EQ(c.energies.rows(), 12u);
  for (std::size_t t = 0; t < c.frames(); ++t) {
    double peak = 0.0;
    for (std::size_t k = 0; k < 12; ++k) {
      EXPECT_GE(c.energies(k, t), 0.0);
      peak = std::max(peak, c.energies(k, t));
    }
    EXPECT_DOUBLE_EQ(peak, 1.0);
  }
}

TEST(Chroma, SilentFramesStayZero) {
  dsp::Waveform w;
  w.sample_rate = 22050;
  w.samples.assign(4096, 0.0);
  const auto c = dsp::chromagram(dsp::stft(w, 2048, 512));
  for (double v : c.energies.data()) EXPECT_EQ(v, 0.0);
}

}  // namespace
