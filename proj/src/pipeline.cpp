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

#include "arionet/pipeline.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "arionet/binary_io.hpp"
#include "arionet/errors.hpp"

namespace arionet::pipeline {

namespace {

double row_mean(const Matrix<double>& m, std::size_t r) {
  const auto row = m.row(r);
  return std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(row.size());
}

double vec_mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::size_t EnergyMask::kept() const {
  return static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true));
}

void DspConfig::validate() const {
  if (sample_rate <= 0) throw ConfigError("sr must be positive");
  if (n_fft <= 0 || !dsp::is_power_of_two(static_cast<std::size_t>(n_fft))) {
    throw ConfigError("n_fft must be a positive power of two");
  }
  if (hop < 1) throw ConfigError("hop must be >= 1");
  if (n_mels < 1) throw ConfigError("n_mels must be >= 1");
  if (n_mels < dsp::kMfccCoeffs) throw ConfigError("n_mels must be >= 13 for MFCCs");
  if (!(energy_ratio >= 0.0 && energy_ratio <= 1.0)) {
    throw ConfigError("energy_ratio must lie in [0, 1]");
  }
  if (chroma_min_frames < 1) throw ConfigError("chroma_min_frames must be >= 1");
  if (!(rolloff_ratio > 0.0 && rolloff_ratio <= 1.0)) {
    throw ConfigError("rolloff ratio must lie in (0, 1]");
  }
}

void FeatureStore::validate() const {
  for (const auto& r : records) {
    const auto where = "record " + std::to_string(r.segment_id);
    if (r.species_id >= species.size()) {
      throw FormatError(FormatError::Kind::kInvalidRecord,
                        where + ": species id " + std::to_string(r.species_id) +
                            " outside label table of " + std::to_string(species.size()));
    }
    if (r.chroma.rows() != dsp::kChromaBins) {
      throw FormatError(FormatError::Kind::kInvalidRecord, where + ": chroma must have 12 rows");
    }
    if (r.chroma.cols() < kMinChromaFrames) {
      throw FormatError(FormatError::Kind::kInvalidRecord,
                        where + ": chroma has fewer than 13 frames");
    }
  }
  for (const auto& name : species) {
    if (name.empty()) {
      throw FormatError(FormatError::Kind::kInvalidRecord, "empty species name");
    }
  }
}

std::vector<std::uint8_t> encode_store(const FeatureStore& store) {
  store.validate();
  io::ByteWriter w;
  w.put_bytes(std::string_view(kStoreMagic, 4));
  w.put<std::uint32_t>(kStoreVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(store.species.size()));
  for (const auto& name : store.species) {
    if (name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw InvalidArgument("species name too long: " + name);
    }
    w.put<std::uint16_t>(static_cast<std::uint16_t>(name.size()));
    w.put_bytes(name);
  }
  w.put<std::uint64_t>(store.records.size());
  for (const auto& r : store.records) {
    w.put<std::uint32_t>(r.species_id);
    w.put<std::uint32_t>(r.segment_id);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(kSummaryDim));
    w.put_array<float>(r.summary);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(r.chroma.rows()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(r.chroma.cols()));
    w.put_array<float>(r.chroma.data());
  }
  return w.bytes();
}

FeatureStore decode_store(std::vector<std::uint8_t> bytes) {
  io::ByteReader r(std::move(bytes), "feature store");
  if (r.remaining() < 4 || r.get_string(4) != std::string(kStoreMagic, 4)) {
    throw FormatError(FormatError::Kind::kBadMagic, "feature store: bad magic");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kStoreVersion) {
    throw FormatError(FormatError::Kind::kUnsupportedVersion,
                      "feature store: unsupported version " + std::to_string(version));
  }
  FeatureStore store;
  const auto species_count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < species_count; ++i) {
    store.species.push_back(r.get_string(r.get<std::uint16_t>()));
  }
  const auto count = r.get<std::uint64_t>();
  for (std::uint64_t i = 0; i < count; ++i) {
    SegmentFeatures rec;
    rec.species_id = r.get<std::uint32_t>();
    rec.segment_id = r.get<std::uint32_t>();
    const auto summary_len = r.get<std::uint32_t>();
    if (summary_len != kSummaryDim) {
      throw FormatError(FormatError::Kind::kInvalidRecord,
                        "feature store: summary length " + std::to_string(summary_len) +
                            " (expected 44)");
    }
    r.get_array<float>(rec.summary);
    const auto rows = r.get<std::uint32_t>();
    const auto cols = r.get<std::uint32_t>();
    if (rows != dsp::kChromaBins) {
      throw FormatError(FormatError::Kind::kInvalidRecord,
                        "feature store: chroma rows " + std::to_string(rows) + " (expected 12)");
    }
    if (static_cast<std::uint64_t>(rows) * cols * sizeof(float) > r.remaining()) {
      throw FormatError(FormatError::Kind::kTruncated, "feature store: truncated chroma");
    }
    rec.chroma = Matrix<float>(rows, cols);
    r.get_array<float>(rec.chroma.data());
    store.records.push_back(std::move(rec));
  }
  if (!r.at_end()) {
    throw FormatError(FormatError::Kind::kInvalidRecord,
                      "feature store: bytes remain after " + std::to_string(count) + " records");
  }
  store.validate();
  return store;
}

void write_store(const FeatureStore& store, const std::filesystem::path& path) {
  io::write_file_atomic(path, encode_store(store));
}

FeatureStore read_store(const std::filesystem::path& path) {
  return decode_store(io::read_file(path));
}

EnergyMask frame_energy_mask(const Matrix<double>& mel, double ratio) {
  if (mel.empty()) throw InvalidArgument("frame_energy_mask: empty mel matrix");
  EnergyMask mask;
  std::vector<double> means(mel.cols(), 0.0);
  for (std::size_t n = 0; n < mel.cols(); ++n) {
    for (std::size_t f = 0; f < mel.rows(); ++f) means[n] += mel(f, n);
    means[n] /= static_cast<double>(mel.rows());
  }
  mask.peak = *std::max_element(means.begin(), means.end());
  mask.threshold = mask.peak * ratio;
  mask.keep.resize(means.size());
  for (std::size_t n = 0; n < means.size(); ++n) mask.keep[n] = means[n] >= mask.threshold;
  return mask;
}

dsp::Waveform mask_to_waveform(const EnergyMask& mask, int hop, int n_fft,
                               const dsp::Waveform& w) {
  std::vector<bool> covered(w.samples.size(), false);
  for (std::size_t n = 0; n < mask.keep.size(); ++n) {
    if (!mask.keep[n]) continue;
    const std::size_t start = n * static_cast<std::size_t>(hop);
    const std::size_t end = std::min(w.samples.size(), start + static_cast<std::size_t>(n_fft));
    for (std::size_t i = start; i < end; ++i) covered[i] = true;
  }
  dsp::Waveform out;
  out.sample_rate = w.sample_rate;
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    if (covered[i]) out.samples.push_back(w.samples[i]);
  }
  return out;
}

dsp::Waveform remove_low_energy(const dsp::Waveform& w, const DspConfig& cfg) {
  const auto spec = dsp::stft(w, cfg.n_fft, cfg.hop);
  const auto mel = dsp::mel_spectrogram(spec, cfg.n_mels);
  const auto mask = frame_energy_mask(mel, cfg.energy_ratio);
  return mask_to_waveform(mask, cfg.hop, cfg.n_fft, w);
}

std::size_t compute_window_size(const std::vector<std::size_t>& lengths,
                                std::optional<std::size_t> override_samples) {
  if (override_samples) {
    if (*override_samples == 0) throw ConfigError("window override must be positive");
    return *override_samples;
  }
  if (lengths.empty()) throw InvalidArgument("compute_window_size: empty dataset");
  return *std::min_element(lengths.begin(), lengths.end());
}

std::vector<dsp::Waveform> segment_windows(const dsp::Waveform& w, std::ptrdiff_t window) {
  if (window <= 0) {
    throw InvalidArgument("segment_windows: window must be positive, got " +
                          std::to_string(window));
  }
  const auto win = static_cast<std::size_t>(window);
  std::vector<dsp::Waveform> out;
  for (std::size_t start = 0; start + win <= w.samples.size(); start += win) {
    dsp::Waveform seg;
    seg.sample_rate = w.sample_rate;
    seg.samples.assign(w.samples.begin() + static_cast<std::ptrdiff_t>(start),
                       w.samples.begin() + static_cast<std::ptrdiff_t>(start + win));
    out.push_back(std::move(seg));
  }
  return out;
}

std::optional<SegmentFeatures> extract_segment(const dsp::Waveform& segment,
                                               const DspConfig& cfg) {
  const auto spec = dsp::stft(segment, cfg.n_fft, cfg.hop);
  const auto chroma = dsp::chromagram(spec);
  if (chroma.frames() < cfg.chroma_min_frames) return std::nullopt;

  const auto mel = dsp::mel_spectrogram(spec, cfg.n_mels);
  const auto mf = dsp::mfcc_with_deltas(mel);

  SegmentFeatures out;
  std::size_t k = 0;
  for (const auto* m : {&mf.coeffs, &mf.delta, &mf.delta2}) {
    for (std::size_t r = 0; r < m->rows(); ++r) out.summary[k++] = static_cast<float>(row_mean(*m, r));
  }
  out.summary[k++] = static_cast<float>(vec_mean(dsp::spectral_centroid(spec)));
  out.summary[k++] = static_cast<float>(vec_mean(dsp::spectral_bandwidth(spec)));
  out.summary[k++] = static_cast<float>(vec_mean(dsp::spectral_rolloff(spec, cfg.rolloff_ratio)));

  // RMS and ZCR over the same framing as the STFT (short tail zero-padded).
  const std::size_t frames = spec.frames();
  const auto nf = static_cast<std::size_t>(cfg.n_fft);
  std::vector<double> frame(nf);
  double rms_sum = 0.0, zcr_sum = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t start = t * static_cast<std::size_t>(cfg.hop);
    for (std::size_t n = 0; n < nf; ++n) {
      frame[n] = start + n < segment.samples.size() ? segment.samples[start + n] : 0.0;
    }
    rms_sum += dsp::rms(frame);
    zcr_sum += dsp::zcr(frame);
  }
  out.summary[k++] = static_cast<float>(rms_sum / static_cast<double>(frames));
  out.summary[k++] = static_cast<float>(zcr_sum / static_cast<double>(frames));

  out.chroma = chroma.energies.cast<float>();
  return out;
}

FeatureStore cap_windows_per_species(const std::vector<TaggedSegment>& segments,
                                     std::optional<std::size_t> cap, std::uint64_t seed) {
  std::set<std::string> names;
  for (const auto& s : segments) names.insert(s.species);

  std::vector<bool> selected(segments.size(), !cap.has_value());
  if (cap) {
    std::mt19937_64 rng(seed);
    for (const auto& name : names) {
      std::vector<std::size_t> recs;
      for (const auto& s : segments) {
        if (s.species == name && std::find(recs.begin(), recs.end(), s.recording) == recs.end()) {
          recs.push_back(s.recording);
        }
      }
      std::shuffle(recs.begin(), recs.end(), rng);
      std::size_t taken = 0;
      for (auto rec : recs) {
        for (std::size_t i = 0; i < segments.size() && taken < *cap; ++i) {
          if (segments[i].recording == rec && segments[i].species == name) {
            selected[i] = true;
            ++taken;
          }
        }
      }
    }
  }

  FeatureStore store;
  std::map<std::string, std::uint32_t> ids;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (selected[i]) ids[segments[i].species] = 0;
  }
  for (auto& [name, id] : ids) {
    id = static_cast<std::uint32_t>(store.species.size());
    store.species.push_back(name);
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (!selected[i]) continue;
    SegmentFeatures rec = segments[i].features;
    rec.species_id = ids.at(segments[i].species);
    rec.segment_id = static_cast<std::uint32_t>(store.records.size());
    store.records.push_back(std::move(rec));
  }
  return store;
}

ExtractResult run_extraction(const std::vector<LabeledRecording>& recordings,
                             const ExtractOptions& options) {
  options.dsp.validate();
  if (recordings.empty()) throw InvalidArgument("run_extraction: no recordings");
  for (const auto& r : recordings) {
    if (r.waveform.sample_rate != options.dsp.sample_rate) {
      throw InvalidArgument("run_extraction: recording at " +
                            std::to_string(r.waveform.sample_rate) + " Hz, expected " +
                            std::to_string(options.dsp.sample_rate));
    }
    if (r.species.empty()) throw InvalidArgument("run_extraction: empty species name");
  }

  const auto n = static_cast<std::ptrdiff_t>(recordings.size());
  std::vector<dsp::Waveform> effective(recordings.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    effective[static_cast<std::size_t>(i)] =
        remove_low_energy(recordings[static_cast<std::size_t>(i)].waveform, options.dsp);
  }

  ExtractResult result;
  // Recordings too short for one window of chroma_min_frames frames do not
  // set the dataset window; they yield no segments.
  const std::size_t min_usable = static_cast<std::size_t>(options.dsp.n_fft) +
                                 (options.dsp.chroma_min_frames - 1) *
                                     static_cast<std::size_t>(options.dsp.hop);
  std::vector<std::size_t> lengths, usable;
  std::size_t raw_total = 0, kept_total = 0;
  for (std::size_t i = 0; i < recordings.size(); ++i) {
    lengths.push_back(effective[i].size());
    if (effective[i].size() >= min_usable) usable.push_back(effective[i].size());
    raw_total += recordings[i].waveform.size();
    kept_total += effective[i].size();
  }
  result.kept_fraction = raw_total ? static_cast<double>(kept_total) / raw_total : 0.0;
  result.window_samples =
      compute_window_size(usable.empty() ? lengths : usable, options.window_override);

  std::vector<std::vector<std::optional<SegmentFeatures>>> per_rec(recordings.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    for (const auto& seg : segment_windows(effective[idx],
                                           static_cast<std::ptrdiff_t>(result.window_samples))) {
      per_rec[idx].push_back(extract_segment(seg, options.dsp));
    }
  }

  std::map<std::string, SpeciesStats> stats;
  std::vector<TaggedSegment> tagged;
  for (std::size_t i = 0; i < recordings.size(); ++i) {
    auto& st = stats[recordings[i].species];
    st.name = recordings[i].species;
    ++st.recordings;
    if (effective[i].size() < min_usable) ++st.short_recordings;
    for (auto& f : per_rec[i]) {
      ++st.windows;
      if (!f) {
        ++st.skipped;
        continue;
      }
      tagged.push_back({i, recordings[i].species, std::move(*f)});
    }
  }

  result.store = cap_windows_per_species(tagged, options.cap_per_species, options.seed);
  for (const auto& rec : result.store.records) {
    ++stats[result.store.species[rec.species_id]].kept;
  }
  for (auto& [name, st] : stats) {
    if (st.kept == 0) result.excluded_species.push_back(name);
    result.stats.push_back(st);
  }
  return result;
}

}  // namespace arionet::pipeline
