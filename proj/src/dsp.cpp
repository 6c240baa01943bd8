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

#include "arionet/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "arionet/errors.hpp"

namespace arionet::dsp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_spectrogram(const Spectrogram& s) {
  if (s.bin_freqs.size() != s.bins()) {
    throw InvalidArgument("spectrogram has " + std::to_string(s.bins()) +
                          " rows but " + std::to_string(s.bin_freqs.size()) +
                          " bin frequencies");
  }
}

// Windowed magnitude spectrum of frame `t` written into column t of `mag`.
void stft_frame(const Waveform& w, const std::vector<double>& window, int n_fft,
                int hop, std::size_t t, std::vector<Complex>& buf,
                Matrix<double>& mag) {
  const std::size_t start = t * static_cast<std::size_t>(hop);
  for (int n = 0; n < n_fft; ++n) {
    const std::size_t idx = start + static_cast<std::size_t>(n);
    const double x = idx < w.samples.size() ? w.samples[idx] : 0.0;
    buf[static_cast<std::size_t>(n)] = Complex(x * window[static_cast<std::size_t>(n)], 0.0);
  }
  fft_inplace(buf);
  for (std::size_t f = 0; f < mag.rows(); ++f) mag(f, t) = std::abs(buf[f]);
}

Spectrogram stft_impl(const Waveform& w, int n_fft, int hop, bool parallel) {
  if (w.samples.empty()) throw InvalidArgument("stft: empty waveform");
  if (w.sample_rate <= 0) throw InvalidArgument("stft: sample rate must be positive");
  if (n_fft <= 0 || !is_power_of_two(static_cast<std::size_t>(n_fft))) {
    throw InvalidArgument("stft: n_fft must be a power of two, got " + std::to_string(n_fft));
  }
  if (hop < 1) throw InvalidArgument("stft: hop must be >= 1");

  const std::size_t frames = frame_count(w.samples.size(), n_fft, hop);
  const std::size_t bins = static_cast<std::size_t>(n_fft) / 2 + 1;

  Spectrogram s;
  s.sample_rate = w.sample_rate;
  s.n_fft = n_fft;
  s.hop = hop;
  s.magnitudes = Matrix<double>(bins, frames);
  s.bin_freqs.resize(bins);
  for (std::size_t f = 0; f < bins; ++f) {
    s.bin_freqs[f] = static_cast<double>(f) * w.sample_rate / n_fft;
  }
  s.frame_times.resize(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    s.frame_times[t] =
        (static_cast<double>(t) * hop + 0.5 * n_fft) / w.sample_rate;
  }

  const auto window = hann_window(static_cast<std::size_t>(n_fft));
  const auto n_frames = static_cast<std::ptrdiff_t>(frames);
  if (parallel) {
#pragma omp parallel
    {
      std::vector<Complex> buf(static_cast<std::size_t>(n_fft));
#pragma omp for schedule(static)
      for (std::ptrdiff_t t = 0; t < n_frames; ++t) {
        stft_frame(w, window, n_fft, hop, static_cast<std::size_t>(t), buf, s.magnitudes);
      }
    }
  } else {
    std::vector<Complex> buf(static_cast<std::size_t>(n_fft));
    for (std::size_t t = 0; t < frames; ++t) {
      stft_frame(w, window, n_fft, hop, t, buf, s.magnitudes);
    }
  }
  return s;
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_inplace(std::span<Complex> x, bool inverse) {
  const std::size_t n = x.size();
  if (!is_power_of_two(n)) {
    throw InvalidArgument("fft: length " + std::to_string(n) +
                          " is not a power of two (zero-pad the input)");
  }
  if (n == 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      const Complex tw = std::polar(1.0, sign * kTwoPi * static_cast<double>(k) /
                                             static_cast<double>(len));
      for (std::size_t i = 0; i < n; i += len) {
        const Complex u = x[i + k];
        const Complex v = x[i + k + half] * tw;
        x[i + k] = u + v;
        x[i + k + half] = u - v;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : x) v *= scale;
  }
}

std::vector<Complex> fft(std::span<const Complex> x) {
  std::vector<Complex> out(x.begin(), x.end());
  fft_inplace(out, false);
  return out;
}

std::vector<Complex> ifft(std::span<const Complex> x) {
  std::vector<Complex> out(x.begin(), x.end());
  fft_inplace(out, true);
  return out;
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

std::size_t frame_count(std::size_t length, int n_fft, int hop) {
  const auto nf = static_cast<std::size_t>(n_fft);
  if (length < nf) return 1;
  return 1 + (length - nf) / static_cast<std::size_t>(hop);
}

Spectrogram stft(const Waveform& w, int n_fft, int hop) {
  return stft_impl(w, n_fft, hop, true);
}

Spectrogram stft_serial(const Waveform& w, int n_fft, int hop) {
  return stft_impl(w, n_fft, hop, false);
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Matrix<double> mel_filterbank(int n_mels, int n_fft, int sample_rate) {
  if (n_mels < 1) throw InvalidArgument("mel_filterbank: n_mels must be >= 1");
  const std::size_t bins = static_cast<std::size_t>(n_fft) / 2 + 1;
  const double mel_max = hz_to_mel(sample_rate / 2.0);

  std::vector<double> edges(static_cast<std::size_t>(n_mels) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_max * static_cast<double>(i) /
                         static_cast<double>(n_mels + 1));
  }

  Matrix<double> filters(static_cast<std::size_t>(n_mels), bins);
  for (std::size_t m = 0; m < filters.rows(); ++m) {
    const double lo = edges[m], centre = edges[m + 1], hi = edges[m + 2];
    bool any = false;
    for (std::size_t f = 0; f < bins; ++f) {
      const double hz = static_cast<double>(f) * sample_rate / n_fft;
      const double up = (hz - lo) / (centre - lo);
      const double down = (hi - hz) / (hi - centre);
      const double wgt = std::max(0.0, std::min(up, down));
      filters(m, f) = wgt;
      any = any || wgt > 0.0;
    }
    if (!any) {
      throw InvalidArgument("mel_filterbank: band " + std::to_string(m) + " of " +
                            std::to_string(n_mels) +
                            " covers no FFT bin; reduce n_mels or raise n_fft");
    }
  }
  return filters;
}

Matrix<double> apply_filterbank(const Matrix<double>& filters, const Spectrogram& s) {
  if (filters.cols() != s.bins()) {
    throw InvalidArgument("apply_filterbank: filterbank expects " +
                          std::to_string(filters.cols()) + " bins, spectrogram has " +
                          std::to_string(s.bins()));
  }
  const std::size_t frames = s.frames();
  Matrix<double> mel(filters.rows(), frames);
  std::vector<std::size_t> first(filters.rows(), 0), last(filters.rows(), 0);
  for (std::size_t b = 0; b < filters.rows(); ++b) {
    const auto row = filters.row(b);
    std::size_t f = 0;
    while (f < row.size() && row[f] == 0.0) ++f;
    first[b] = f;
    std::size_t l = row.size();
    while (l > f && row[l - 1] == 0.0) --l;
    last[b] = l;
  }
  std::vector<double> power(s.bins());
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t f = 0; f < s.bins(); ++f) {
      const double m = s.magnitudes(f, t);
      power[f] = m * m;
    }
    for (std::size_t b = 0; b < filters.rows(); ++b) {
      const auto row = filters.row(b);
      double acc = 0.0;
      for (std::size_t f = first[b]; f < last[b]; ++f) acc += row[f] * power[f];
      mel(b, t) = acc;
    }
  }
  return mel;
}

Matrix<double> mel_spectrogram(const Spectrogram& s, int n_mels) {
  check_spectrogram(s);
  return apply_filterbank(mel_filterbank(n_mels, s.n_fft, s.sample_rate), s);
}

Matrix<double> mfcc(const Matrix<double>& mel, int n_coeffs) {
  const std::size_t n = mel.rows();
  if (n == 0) throw InvalidArgument("mfcc: empty mel matrix");
  if (n_coeffs < 1 || static_cast<std::size_t>(n_coeffs) > n) {
    throw InvalidArgument("mfcc: n_coeffs must be in [1, n_mels]");
  }
  const auto k_max = static_cast<std::size_t>(n_coeffs);

  Matrix<double> basis(k_max, n);
  for (std::size_t k = 0; k < k_max; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (std::size_t i = 0; i < n; ++i) {
      basis(k, i) = scale * std::cos(std::numbers::pi * static_cast<double>(k) *
                                     (2.0 * i + 1.0) / (2.0 * n));
    }
  }

  Matrix<double> out(k_max, mel.cols());
  std::vector<double> logmel(n);
  for (std::size_t t = 0; t < mel.cols(); ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (mel(i, t) < 0.0) throw InvalidArgument("mfcc: negative mel energy");
      logmel[i] = std::log(mel(i, t) + kLogFloor);
    }
    for (std::size_t k = 0; k < k_max; ++k) {
      const auto b = basis.row(k);
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += b[i] * logmel[i];
      out(k, t) = acc;
    }
  }
  return out;
}

Matrix<double> delta(const Matrix<double>& seq) {
  Matrix<double> out(seq.rows(), seq.cols());
  for (std::size_t r = 0; r < seq.rows(); ++r) {
    for (std::size_t t = 1; t < seq.cols(); ++t) {
      out(r, t) = seq(r, t) - seq(r, t - 1);
    }
  }
  return out;
}

MfccMatrix mfcc_with_deltas(const Matrix<double>& mel, int n_coeffs) {
  MfccMatrix m;
  m.coeffs = mfcc(mel, n_coeffs);
  m.delta = delta(m.coeffs);
  m.delta2 = delta(m.delta);
  return m;
}

std::vector<double> spectral_centroid(const Spectrogram& s) {
  check_spectrogram(s);
  std::vector<double> out(s.frames(), 0.0);
  for (std::size_t t = 0; t < s.frames(); ++t) {
    double num = 0.0, den = 0.0;
    for (std::size_t f = 0; f < s.bins(); ++f) {
      num += s.bin_freqs[f] * s.magnitudes(f, t);
      den += s.magnitudes(f, t);
    }
    out[t] = den > 0.0 ? num / den : 0.0;
  }
  return out;
}

std::vector<double> spectral_bandwidth(const Spectrogram& s) {
  const auto centroid = spectral_centroid(s);
  std::vector<double> out(s.frames(), 0.0);
  for (std::size_t t = 0; t < s.frames(); ++t) {
    double num = 0.0, den = 0.0;
    for (std::size_t f = 0; f < s.bins(); ++f) {
      const double d = s.bin_freqs[f] - centroid[t];
      num += d * d * s.magnitudes(f, t);
      den += s.magnitudes(f, t);
    }
    out[t] = den > 0.0 ? std::sqrt(num / den) : 0.0;
  }
  return out;
}

std::vector<double> spectral_rolloff(const Spectrogram& s, double ratio) {
  check_spectrogram(s);
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw InvalidArgument("spectral_rolloff: ratio must lie in (0, 1]");
  }
  std::vector<double> out(s.frames(), 0.0);
  for (std::size_t t = 0; t < s.frames(); ++t) {
    double total = 0.0;
    for (std::size_t f = 0; f < s.bins(); ++f) total += s.magnitudes(f, t);
    if (total <= 0.0) continue;
    const double target = ratio * total;
    double cum = 0.0;
    for (std::size_t f = 0; f < s.bins(); ++f) {
      cum += s.magnitudes(f, t);
      if (cum >= target) {
        out[t] = s.bin_freqs[f];
        break;
      }
    }
    // Rounding can leave cum a hair under target when ratio == 1.
    if (cum < target) {
      for (std::size_t f = s.bins(); f-- > 0;) {
        if (s.magnitudes(f, t) > 0.0) {
          out[t] = s.bin_freqs[f];
          break;
        }
      }
    }
  }
  return out;
}

double rms(std::span<const double> frame) {
  if (frame.empty()) throw InvalidArgument("rms: empty frame");
  double acc = 0.0;
  for (double x : frame) acc += x * x;
  return std::sqrt(acc / static_cast<double>(frame.size()));
}

double zcr(std::span<const double> frame) {
  if (frame.size() < 2) throw InvalidArgument("zcr: frame needs at least 2 samples");
  std::size_t flips = 0;
  for (std::size_t n = 0; n + 1 < frame.size(); ++n) {
    if (frame[n] * frame[n + 1] < 0.0) ++flips;
  }
  return static_cast<double>(flips) / static_cast<double>(frame.size() - 1);
}

int pitch_class(double hz, double ref_a4) {
  const double midi = 12.0 * std::log2(hz / ref_a4) + 69.0;
  const long rounded = std::lround(midi);
  return static_cast<int>(((rounded % 12) + 12) % 12);
}

Chromagram chromagram(const Spectrogram& s, double ref_a4) {
  check_spectrogram(s);
  Chromagram c;
  c.energies = Matrix<double>(kChromaBins, s.frames());

  std::vector<int> cls(s.bins(), -1);
  for (std::size_t f = 0; f < s.bins(); ++f) {
    if (s.bin_freqs[f] >= kMinPitchHz) cls[f] = pitch_class(s.bin_freqs[f], ref_a4);
  }

  for (std::size_t t = 0; t < s.frames(); ++t) {
    for (std::size_t f = 0; f < s.bins(); ++f) {
      if (cls[f] >= 0) c.energies(static_cast<std::size_t>(cls[f]), t) += s.magnitudes(f, t);
    }
    double peak = 0.0;
    for (std::size_t k = 0; k < kChromaBins; ++k) peak = std::max(peak, c.energies(k, t));
    if (peak > 0.0) {
      for (std::size_t k = 0; k < kChromaBins; ++k) c.energies(k, t) /= peak;
    }
  }
  c.normalized = true;
  return c;
}

}  // namespace arionet::dsp
