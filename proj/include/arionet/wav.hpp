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

// RIFF/WAVE reading (PCM16 or float32, mono or stereo) and PCM16 writing.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "arionet/dsp.hpp"

namespace arionet::audio {

/// Stereo is averaged to mono. PCM16 is scaled by 1/32768. Errors are
/// FormatError naming the offending chunk.
dsp::Waveform decode_wav(std::vector<std::uint8_t> bytes, const std::string& context = "wav");

/// Reads and decodes; resamples linearly when `target_rate` differs.
dsp::Waveform read_wav(const std::filesystem::path& path,
                       std::optional<int> target_rate = std::nullopt);

/// Linear interpolation to `target_rate`; output length round(n * target / rate).
dsp::Waveform resample_linear(const dsp::Waveform& w, int target_rate);

/// Mono PCM16, samples clipped to [-1, 1] and rounded.
std::vector<std::uint8_t> encode_wav_pcm16(const dsp::Waveform& w);
void write_wav(const std::filesystem::path& path, const dsp::Waveform& w);

}  // namespace arionet::audio
