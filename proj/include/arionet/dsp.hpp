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

// Signal-processing kernels: FFT/STFT, mel filterbank, MFCC + deltas,
// spectral descriptors, RMS, zero-crossing rate and chromagram.
//
// All functions are pure; they may be called concurrently.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "arionet/matrix.hpp"

namespace arionet::dsp {

using Complex = std::complex<double>;

inline constexpr int kChromaBins = 12;
inline constexpr int kMfccCoeffs = 13;
inline constexpr double kLogFloor = 1e-10;
inline constexpr double kMinPitchHz = 20.0;

struct Waveform {
  std::vector<double> samples;
  int sample_rate = 0;

  std::size_t size() const { return samples.size(); }
  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// Magnitude STFT. `magnitudes` is F x T with F = n_fft / 2 + 1.
struct Spectrogram {
  Matrix<double> magnitudes;
  std::vector<double> bin_freqs;
  std::vector<double> frame_times;
  int sample_rate = 0;
  int n_fft = 0;
  int hop = 0;

  std::size_t bins() const { return magnitudes.rows(); }
  std::size_t frames() const { return magnitudes.cols(); }
};

struct MfccMatrix {
  Matrix<double> coeffs;
  Matrix<double> delta;
  Matrix<double> delta2;
};

struct Chromagram {
  Matrix<double> energies;  // 12 x T
  bool normalized = false;

  std::size_t frames() const { return energies.cols(); }
};

bool is_power_of_two(std::size_t n);

/// In-place iterative radix-2 transform. Throws InvalidArgument unless the
/// length is a power of two. The inverse is scaled by 1/N.
void fft_inplace(std::span<Complex> x, bool inverse = false);
std::vector<Complex> fft(std::span<const Complex> x);
std::vector<Complex> ifft(std::span<const Complex> x);

/// Periodic Hann window of length n.
std::vector<double> hann_window(std::size_t n);

/// Number of frames produced by stft() for a signal of `length` samples.
std::size_t frame_count(std::size_t length, int n_fft, int hop);

/// Hann-windowed magnitude STFT without centre padding. A signal shorter than
/// n_fft yields one zero-padded frame. Frames are processed in parallel.
Spectrogram stft(const Waveform& w, int n_fft, int hop);

/// Frame-serial reference for stft(); identical output.
Spectrogram stft_serial(const Waveform& w, int n_fft, int hop);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// HTK-scale triangular filters spanning [0, sr/2], n_mels x (n_fft/2 + 1).
/// Throws if any filter has no bin inside its support.
Matrix<double> mel_filterbank(int n_mels, int n_fft, int sample_rate);

/// Mel power spectrogram (n_mels x T) from a magnitude spectrogram.
Matrix<double> mel_spectrogram(const Spectrogram& s, int n_mels);
Matrix<double> apply_filterbank(const Matrix<double>& filters, const Spectrogram& s);

/// Orthonormal DCT-II of log(mel + 1e-10), first `n_coeffs` coefficients.
Matrix<double> mfcc(const Matrix<double>& mel, int n_coeffs = kMfccCoeffs);

/// Backward difference along time; the first column is zero.
Matrix<double> delta(const Matrix<double>& seq);

MfccMatrix mfcc_with_deltas(const Matrix<double>& mel, int n_coeffs = kMfccCoeffs);

// Per-frame spectral descriptors. A zero-energy frame yields 0.
std::vector<double> spectral_centroid(const Spectrogram& s);
std::vector<double> spectral_bandwidth(const Spectrogram& s);
std::vector<double> spectral_rolloff(const Spectrogram& s, double ratio = 0.85);

double rms(std::span<const double> frame);
double zcr(std::span<const double> frame);

/// Pitch class (0 = C, 9 = A) of a frequency, relative to A4 = ref_a4.
int pitch_class(double hz, double ref_a4 = 440.0);

/// Sums magnitudes per pitch class (bins under 20 Hz ignored) and normalizes
/// each column by its maximum.
Chromagram chromagram(const Spectrogram& s, double ref_a4 = 440.0);

}  // namespace arionet::dsp
