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

#include "arionet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "arionet/binary_io.hpp"
#include "arionet/errors.hpp"
#include "arionet/wav.hpp"

namespace arionet::synth {

double pitch_class_frequency(int pitch_class, int octave) {
  const int midi = 12 * (octave + 1) + pitch_class;
  return 440.0 * std::pow(2.0, (midi - 69) / 12.0);
}

namespace {

void render_note(std::vector<double>& out, std::size_t start, double freq, double seconds,
                 double amp, int sr) {
  const auto len = static_cast<std::size_t>(seconds * sr);
  const auto ramp = std::max<std::size_t>(1, static_cast<std::size_t>(0.01 * sr));
  for (std::size_t i = 0; i < len && start + i < out.size(); ++i) {
    double env = 1.0;
    if (i < ramp) env = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i) / ramp);
    if (len - i <= ramp) {
      env = std::min(env, 0.5 - 0.5 * std::cos(std::numbers::pi *
                                               static_cast<double>(len - i) / ramp));
    }
    const double t = static_cast<double>(i) / sr;
    const double phase = 2.0 * std::numbers::pi * freq * t;
    out[start + i] += amp * env * (std::sin(phase) + 0.2 * std::sin(2.0 * phase));
  }
}

SpeciesProfile make_profile(std::size_t index, int pc_a, int pc_b, std::mt19937_64& rng) {
  SpeciesProfile p;
  p.name = "sp" + std::to_string(index + 1);
  p.pitch_classes = {pc_a, pc_b};
  const std::size_t notes = 2 + index % 3;
  std::uniform_real_distribution<double> dur(0.06, 0.22), gap(0.02, 0.08);
  std::uniform_int_distribution<int> octave(6, 7), coin(0, 1);
  for (std::size_t i = 0; i < notes; ++i) {
    // First two notes use both pitch classes; later ones pick either.
    const int pc = i < 2 ? p.pitch_classes[i] : p.pitch_classes[static_cast<std::size_t>(coin(rng))];
    p.motif.push_back({pc, octave(rng), dur(rng), gap(rng)});
  }
  return p;
}

dsp::Waveform render_recording(const SpeciesProfile& p, const SynthOptions& opts,
                               std::mt19937_64& rng) {
  const int sr = opts.sample_rate;
  std::uniform_real_distribution<double> seconds(opts.min_seconds, opts.max_seconds);
  std::uniform_real_distribution<double> lead(0.1, 0.4), pause(0.15, 0.45), amp(0.3, 0.6);
  std::uniform_real_distribution<double> tempo(0.95, 1.05), detune(0.997, 1.003);
  std::normal_distribution<double> noise(0.0, opts.noise_level);

  dsp::Waveform w;
  w.sample_rate = sr;
  w.samples.assign(static_cast<std::size_t>(seconds(rng) * sr), 0.0);
  const double total = static_cast<double>(w.samples.size()) / sr;
  const double stretch = tempo(rng), tune = detune(rng);

  double t = lead(rng);
  const double motif_len = std::accumulate(p.motif.begin(), p.motif.end(), 0.0,
                                           [](double a, const Note& n) {
                                             return a + n.seconds + n.gap_after;
                                           }) *
                           stretch;
  while (t + motif_len < total - 0.1) {
    const double a = amp(rng);
    for (const auto& n : p.motif) {
      render_note(w.samples, static_cast<std::size_t>(t * sr),
                  pitch_class_frequency(n.pitch_class, n.octave) * tune, n.seconds * stretch, a,
                  sr);
      t += (n.seconds + n.gap_after) * stretch;
    }
    t += pause(rng);
  }
  for (auto& s : w.samples) s += noise(rng);
  return w;
}

}  // namespace

SynthCorpus make_synthetic_dataset(const SynthOptions& opts) {
  if (opts.species == 0 || opts.species > 6) {
    throw ConfigError("synth: species must lie in [1, 6]");
  }
  if (opts.recordings_per_species == 0) throw ConfigError("synth: recordings must be positive");
  if (opts.sample_rate < 16000) {
    throw ConfigError("synth: sample rate must be >= 16000 to hold the note range");
  }
  if (!(opts.min_seconds >= 1.0 && opts.max_seconds >= opts.min_seconds)) {
    throw ConfigError("synth: need 1 <= min_seconds <= max_seconds");
  }

  std::mt19937_64 rng(opts.seed);
  std::vector<int> pcs(12);
  std::iota(pcs.begin(), pcs.end(), 0);
  std::shuffle(pcs.begin(), pcs.end(), rng);

  SynthCorpus corpus;
  for (std::size_t s = 0; s < opts.species; ++s) {
    corpus.species.push_back(make_profile(s, pcs[2 * s], pcs[2 * s + 1], rng));
  }
  for (const auto& p : corpus.species) {
    for (std::size_t r = 0; r < opts.recordings_per_species; ++r) {
      char name[64];
      std::snprintf(name, sizeof(name), "%s_%03zu.wav", p.name.c_str(), r);
      corpus.recordings.push_back({name, p.name, render_recording(p, opts, rng)});
    }
  }
  return corpus;
}

std::filesystem::path write_synthetic_dataset(const std::filesystem::path& dir,
                                              const SynthOptions& opts) {
  const auto corpus = make_synthetic_dataset(opts);
  std::filesystem::create_directories(dir);
  std::ostringstream manifest;
  manifest << "path,species\n";
  for (const auto& r : corpus.recordings) {
    audio::write_wav(dir / r.file, r.waveform);
    manifest << r.file << ',' << r.species << '\n';
  }
  const auto path = dir / "manifest.csv";
  io::write_text_atomic(path, manifest.str());
  return path;
}

}  // namespace arionet::synth
