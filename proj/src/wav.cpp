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

#include "arionet/wav.hpp"

#include <algorithm>
#include <cmath>

#include "arionet/binary_io.hpp"
#include "arionet/errors.hpp"

namespace arionet::audio {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct Format {
  std::uint16_t tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
};

}  // namespace

dsp::Waveform decode_wav(std::vector<std::uint8_t> bytes, const std::string& context) {
  using Kind = FormatError::Kind;
  auto fail = [&](Kind kind, const std::string& what) {
    return FormatError(kind, context + ": " + what);
  };
  io::ByteReader r(std::move(bytes), context);
  if (r.remaining() < 12) throw fail(Kind::kTruncated, "RIFF header truncated");
  if (r.get_string(4) != "RIFF") throw fail(Kind::kBadMagic, "RIFF header: missing 'RIFF'");
  r.get<std::uint32_t>();
  if (r.get_string(4) != "WAVE") throw fail(Kind::kBadMagic, "RIFF header: missing 'WAVE'");

  std::optional<Format> fmt;
  while (r.remaining() >= 8) {
    const auto id = r.get_string(4);
    const auto size = r.get<std::uint32_t>();
    if (id == "fmt ") {
      if (size < 16 || size > r.remaining()) throw fail(Kind::kTruncated, "fmt chunk truncated");
      Format f;
      f.tag = r.get<std::uint16_t>();
      f.channels = r.get<std::uint16_t>();
      f.rate = r.get<std::uint32_t>();
      r.get<std::uint32_t>();  // byte rate
      r.get<std::uint16_t>();  // block align
      f.bits = r.get<std::uint16_t>();
      std::size_t used = 16;
      if (f.tag == kFormatExtensible) {
        if (size < 40) throw fail(Kind::kTruncated, "fmt chunk: short extensible header");
        r.get<std::uint16_t>();  // cbSize
        r.get<std::uint16_t>();  // valid bits
        r.get<std::uint32_t>();  // channel mask
        f.tag = r.get<std::uint16_t>();
        r.get_string(14);
        used = 40;
      }
      r.get_string(size - used + (size & 1u));
      if (f.tag != kFormatPcm && f.tag != kFormatFloat) {
        throw fail(Kind::kUnsupportedEncoding,
                   "fmt chunk: compressed format tag " + std::to_string(f.tag));
      }
      if ((f.tag == kFormatPcm && f.bits != 16) || (f.tag == kFormatFloat && f.bits != 32)) {
        throw fail(Kind::kUnsupportedEncoding,
                   "fmt chunk: unsupported sample width " + std::to_string(f.bits) + " bits");
      }
      if (f.channels < 1 || f.channels > 2) {
        throw fail(Kind::kUnsupportedEncoding,
                   "fmt chunk: " + std::to_string(f.channels) + " channels (1 or 2 supported)");
      }
      if (f.rate == 0) throw fail(Kind::kInvalidRecord, "fmt chunk: zero sample rate");
      fmt = f;
    } else if (id == "data") {
      if (!fmt) throw fail(Kind::kInvalidRecord, "data chunk before fmt chunk");
      if (size > r.remaining()) {
        throw fail(Kind::kTruncated, "data chunk truncated: declares " + std::to_string(size) +
                                         " bytes, " + std::to_string(r.remaining()) + " present");
      }
      const std::size_t width = fmt->bits / 8u;
      const std::size_t frame = width * fmt->channels;
      if (size % frame != 0) throw fail(Kind::kTruncated, "data chunk: partial sample frame");
      const std::size_t frames = size / frame;
      dsp::Waveform w;
      w.sample_rate = static_cast<int>(fmt->rate);
      w.samples.resize(frames);
      for (std::size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < fmt->channels; ++c) {
          acc += fmt->tag == kFormatPcm ? r.get<std::int16_t>() / 32768.0
                                        : static_cast<double>(r.get<float>());
        }
        w.samples[i] = acc / fmt->channels;
      }
      return w;
    } else {
      if (size > r.remaining()) throw fail(Kind::kTruncated, "'" + id + "' chunk truncated");
      r.get_string(size);
      if ((size & 1u) != 0 && r.remaining() > 0) r.get<std::uint8_t>();
    }
  }
  throw fail(Kind::kInvalidRecord, fmt ? "no data chunk" : "no fmt chunk");
}

dsp::Waveform read_wav(const std::filesystem::path& path, std::optional<int> target_rate) {
  auto w = decode_wav(io::read_file(path), path.string());
  if (target_rate && *target_rate != w.sample_rate) w = resample_linear(w, *target_rate);
  return w;
}

dsp::Waveform resample_linear(const dsp::Waveform& w, int target_rate) {
  if (target_rate <= 0 || w.sample_rate <= 0) {
    throw InvalidArgument("resample_linear: sample rates must be positive");
  }
  if (target_rate == w.sample_rate || w.samples.empty()) {
    dsp::Waveform out = w;
    out.sample_rate = target_rate;
    return out;
  }
  const double ratio = static_cast<double>(w.sample_rate) / target_rate;
  const auto n = static_cast<std::size_t>(
      std::llround(static_cast<double>(w.samples.size()) / ratio));
  dsp::Waveform out;
  out.sample_rate = target_rate;
  out.samples.resize(n);
  const std::size_t last = w.samples.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double pos = static_cast<double>(i) * ratio;
    const auto i0 = std::min(static_cast<std::size_t>(pos), last);
    const std::size_t i1 = std::min(i0 + 1, last);
    const double frac = pos - static_cast<double>(i0);
    out.samples[i] = w.samples[i0] + (w.samples[i1] - w.samples[i0]) * frac;
  }
  return out;
}

std::vector<std::uint8_t> encode_wav_pcm16(const dsp::Waveform& w) {
  const auto data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
  io::ByteWriter out;
  out.put_bytes("RIFF");
  out.put<std::uint32_t>(36 + data_bytes);
  out.put_bytes("WAVE");
  out.put_bytes("fmt ");
  out.put<std::uint32_t>(16);
  out.put<std::uint16_t>(kFormatPcm);
  out.put<std::uint16_t>(1);
  out.put<std::uint32_t>(static_cast<std::uint32_t>(w.sample_rate));
  out.put<std::uint32_t>(static_cast<std::uint32_t>(w.sample_rate) * 2);
  out.put<std::uint16_t>(2);
  out.put<std::uint16_t>(16);
  out.put_bytes("data");
  out.put<std::uint32_t>(data_bytes);
  for (double s : w.samples) {
    const double v = std::clamp(s, -1.0, 1.0) * 32767.0;
    out.put<std::int16_t>(static_cast<std::int16_t>(std::lround(v)));
  }
  return out.bytes();
}

void write_wav(const std::filesystem::path& path, const dsp::Waveform& w) {
  io::write_file_atomic(path, encode_wav_pcm16(w));
}

}  // namespace arionet::audio
