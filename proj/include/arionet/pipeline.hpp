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

// Preprocessing and feature extraction: energy-based silence removal,
// dataset-wide windowing, chroma-length filtering, and per-segment feature
// assembly into a FeatureStore.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "arionet/dsp.hpp"
#include "arionet/matrix.hpp"

namespace arionet::pipeline {

inline constexpr std::size_t kSummaryDim = 44;
inline constexpr std::size_t kMinChromaFrames = 13;

struct EnergyMask {
  std::vector<bool> keep;
  double threshold = 0.0;
  double peak = 0.0;

  std::size_t kept() const;
};

struct DspConfig {
  int sample_rate = 22050;
  int n_fft = 2048;
  int hop = 512;
  int n_mels = 128;
  double energy_ratio = 0.05;
  std::size_t chroma_min_frames = kMinChromaFrames;
  double rolloff_ratio = 0.85;

  void validate() const;
};

/// One stored segment. `summary` layout: 13 MFCC means, 13 delta means,
/// 13 delta-delta means, centroid, bandwidth, rolloff, RMS, ZCR.
struct SegmentFeatures {
  std::array<float, kSummaryDim> summary{};
  Matrix<float> chroma;  // 12 x T, T >= 13
  std::uint32_t species_id = 0;
  std::uint32_t segment_id = 0;

  bool operator==(const SegmentFeatures&) const = default;
};

struct FeatureStore {
  std::vector<std::string> species;  // index = species id
  std::vector<SegmentFeatures> records;

  std::size_t species_count() const { return species.size(); }
  std::size_t size() const { return records.size(); }

  /// Throws FormatError(kInvalidRecord) if a record breaks an invariant.
  void validate() const;

  bool operator==(const FeatureStore&) const = default;
};

inline constexpr char kStoreMagic[4] = {'A', 'R', 'I', 'O'};
inline constexpr std::uint32_t kStoreVersion = 1;

std::vector<std::uint8_t> encode_store(const FeatureStore& store);
FeatureStore decode_store(std::vector<std::uint8_t> bytes);
void write_store(const FeatureStore& store, const std::filesystem::path& path);
FeatureStore read_store(const std::filesystem::path& path);

/// Frame means of `mel` (bands x frames); frames below ratio * peak are dropped.
/// An all-zero input keeps every frame.
EnergyMask frame_energy_mask(const Matrix<double>& mel, double ratio = 0.05);

/// Keeps every sample covered by at least one kept frame's [start, start+n_fft).
dsp::Waveform mask_to_waveform(const EnergyMask& mask, int hop, int n_fft,
                               const dsp::Waveform& w);

/// STFT -> mel -> energy mask -> masked waveform.
dsp::Waveform remove_low_energy(const dsp::Waveform& w, const DspConfig& cfg);

/// Minimum of `lengths`, or `override_samples` when given.
std::size_t compute_window_size(const std::vector<std::size_t>& lengths,
                                std::optional<std::size_t> override_samples = std::nullopt);

/// floor(len / window) non-overlapping windows; the remainder is dropped.
std::vector<dsp::Waveform> segment_windows(const dsp::Waveform& w, std::ptrdiff_t window);

/// Chromagram first; segments with fewer than chroma_min_frames columns return
/// nullopt. species_id / segment_id are left for the caller.
std::optional<SegmentFeatures> extract_segment(const dsp::Waveform& segment,
                                               const DspConfig& cfg);

struct LabeledRecording {
  dsp::Waveform waveform;  // already at cfg.sample_rate
  std::string species;
};

struct SpeciesStats {
  std::string name;
  std::size_t recordings = 0;
  std::size_t windows = 0;
  std::size_t skipped = 0;           // windows with too few chroma frames
  std::size_t short_recordings = 0;  // effective length below one usable window
  std::size_t kept = 0;              // after the per-species cap
};

struct ExtractOptions {
  DspConfig dsp;
  std::optional<std::size_t> window_override;
  std::optional<std::size_t> cap_per_species;
  std::uint64_t seed = 0;
};

struct ExtractResult {
  FeatureStore store;
  std::size_t window_samples = 0;
  std::vector<SpeciesStats> stats;  // sorted by species name
  std::vector<std::string> excluded_species;
  double kept_fraction = 0.0;  // post-filter samples / raw samples
};

/// Per-segment record still tagged with its recording index.
struct TaggedSegment {
  std::size_t recording = 0;
  std::string species;
  SegmentFeatures features;
};

/// Keeps at most `cap` segments per species: recordings are shuffled with
/// `seed` and segments are taken in that order. Species without segments are
/// dropped. Returns the store with dense species ids (sorted by name).
FeatureStore cap_windows_per_species(const std::vector<TaggedSegment>& segments,
                                     std::optional<std::size_t> cap, std::uint64_t seed);

/// Full extraction over a dataset. Recordings are processed in parallel and
/// merged in input order. The window is the shortest effective length among
/// recordings long enough for chroma_min_frames frames (all recordings when
/// none is).
ExtractResult run_extraction(const std::vector<LabeledRecording>& recordings,
                             const ExtractOptions& options);

}  // namespace arionet::pipeline
