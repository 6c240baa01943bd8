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

// Seeded synthetic birdsong corpus. Each species repeats its own 2 to 4 note
// motif built from a private pair of pitch classes, separated by silent gaps
// and covered by low-level noise.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "arionet/dsp.hpp"

namespace arionet::synth {

struct SynthOptions {
  std::size_t species = 5;
  std::size_t recordings_per_species = 20;
  std::uint64_t seed = 7;
  int sample_rate = 22050;
  double min_seconds = 2.5;
  double max_seconds = 3.5;
  double noise_level = 0.003;
};

struct Note {
  int pitch_class = 0;
  int octave = 6;
  double seconds = 0.1;
  double gap_after = 0.03;
};

struct SpeciesProfile {
  std::string name;
  std::vector<int> pitch_classes;  // disjoint across species
  std::vector<Note> motif;
};

struct SynthRecording {
  std::string file;  // relative to the output directory
  std::string species;
  dsp::Waveform waveform;
};

struct SynthCorpus {
  std::vector<SpeciesProfile> species;
  std::vector<SynthRecording> recordings;
};

/// At most 6 species (two private pitch classes each).
SynthCorpus make_synthetic_dataset(const SynthOptions& opts);

/// Writes every recording as PCM16 WAV plus `manifest.csv` (`path,species`).
/// Returns the manifest path.
std::filesystem::path write_synthetic_dataset(const std::filesystem::path& dir,
                                              const SynthOptions& opts);

double pitch_class_frequency(int pitch_class, int octave);

}  // namespace arionet::synth
