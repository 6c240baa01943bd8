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

#include <cstring>
#include <random>

#include "arionet/checkpoint.hpp"
#include "arionet/encoder.hpp"
#include "arionet/errors.hpp"
#include "arionet/pipeline.hpp"
#include "arionet/wav.hpp"
#include "test_util.hpp"

namespace {

using namespace arionet;
using Kind = FormatError::Kind;

template <typename F>
Kind error_kind(F&& f) {
  try {
    f();
  } catch (const FormatError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no FormatError raised";
  return Kind::kIo;
}

pipeline::FeatureStore sample_store() {
  std::mt19937_64 rng(1);
  pipeline::FeatureStore s;
  s.species = {"finch", "wren"};
  for (std::uint32_t i = 0; i < 3; ++i) {
    pipeline::SegmentFeatures f;
    for (auto& v : f.summary) v = static_cast<float>(rng() % 1000) / 7.0f;
    f.chroma = testutil::random_chroma(13 + i, rng);
    f.species_id = i % 2;
    f.segment_id = i;
    s.records.push_back(std::move(f));
  }
  return s;
}

// magic, version, species count, names, record count.
std::size_t first_record_offset(const pipeline::FeatureStore& s) {
  std::size_t off = 12;
  for (const auto& n : s.species) off += 2 + n.size();
  return off + 8;
}

TEST(Store, RoundTripIsBitExact) {
  const auto s = sample_store();
  const auto bytes = pipeline::encode_store(s);
  const auto d = pipeline::decode_store(bytes);
  EXPECT_EQ(d, s);
  EXPECT_EQ(pipeline::encode_store(d), bytes);
  EXPECT_EQ(std::memcmp(bytes.data(), "ARIO", 4), 0);

  testutil::TempDir dir("store");
  pipeline::write_store(s, dir / "s.ario");
  EXPECT_EQ(pipeline::read_store(dir / "s.ario"), s);
  EXPECT_FALSE(std::filesystem::exists(dir / "s.ario.tmp"));
}

TEST(Store, CorruptionRaisesTypedErrors) {
  const auto s = sample_store();
  const auto good = pipeline::encode_store(s);

  auto bad = good;
  bad[1] = 'X';
  EXPECT_EQ(error_kind([&] { pipeline::decode_store(bad); }), Kind::kBadMagic);

  bad = good;
  bad[4] = 2;
  EXPECT_EQ(error_kind([&] { pipeline::decode_store(bad); }), Kind::kUnsupportedVersion);

  for (std::size_t cut : {std::size_t{6}, first_record_offset(s) + 5, good.size() - 3}) {
    std::vector<std::uint8_t> t(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(cut));
    EXPECT_EQ(error_kind([&] { pipeline::decode_store(t); }), Kind::kTruncated) << cut;
  }

  bad = good;
  bad[first_record_offset(s) + 8] = 43;  // summary length
  EXPECT_EQ(error_kind([&] { pipeline::decode_store(bad); }), Kind::kInvalidRecord);

  bad = good;
  bad[first_record_offset(s)] = 9;  // species id out of range
  EXPECT_EQ(error_kind([&] { pipeline::decode_store(bad); }), Kind::kInvalidRecord);

  bad = good;
  bad.push_back(0);
  EXPECT_EQ(error_kind([&] { pipeline::decode_store(bad); }), Kind::kInvalidRecord);

  testutil::TempDir dir("store_missing");
  EXPECT_EQ(error_kind([&] { pipeline::read_store(dir / "none.ario"); }), Kind::kIo);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  model::EncoderConfig cfg;
  cfg.blocks = 1;
  cfg.d_model = 16;
  cfg.heads = 2;
  cfg.ffn_dim = 8;
  cfg.proj_dim = 4;
  model::ChromaEncoder<float> a(cfg, 1), b(cfg, 2);
  const auto tensors = nn::to_checkpoint(a.params());
  const auto bytes = nn::encode_checkpoint(tensors);
  EXPECT_EQ(nn::decode_checkpoint(bytes), tensors);
  EXPECT_EQ(nn::encode_checkpoint(nn::decode_checkpoint(bytes)), bytes);

  nn::load_into(b.params(), nn::decode_checkpoint(bytes));
  for (std::size_t i = 0; i < a.params().size(); ++i) {
    const auto x = a.params()[i].tensor.data();
    const auto y = b.params()[i].tensor.data();
    EXPECT_EQ(std::memcmp(x.data(), y.data(), x.size_bytes()), 0);
  }

  testutil::TempDir dir("ck");
  nn::write_checkpoint(dir / "m.arck", tensors);
  EXPECT_EQ(testutil::file_bytes(dir / "m.arck"), bytes);
  EXPECT_EQ(nn::read_checkpoint(dir / "m.arck"), tensors);
}

TEST(Checkpoint, CorruptionAndMismatch) {
  std::vector<nn::CheckpointTensor> t{{"w", {2, 3}, {1, 2, 3, 4, 5, 6}}, {"b", {3}, {0, 0, 1}}};
  const auto good = nn::encode_checkpoint(t);
  auto bad = good;
  bad[0] = 'Z';
  EXPECT_EQ(error_kind([&] { nn::decode_checkpoint(bad); }), Kind::kBadMagic);
  bad = good;
  bad[4] = 7;
  EXPECT_EQ(error_kind([&] { nn::decode_checkpoint(bad); }), Kind::kUnsupportedVersion);
  std::vector<std::uint8_t> cut(good.begin(), good.end() - 2);
  EXPECT_EQ(error_kind([&] { nn::decode_checkpoint(cut); }), Kind::kTruncated);
  bad = good;
  bad.push_back(1);
  EXPECT_EQ(error_kind([&] { nn::decode_checkpoint(bad); }), Kind::kInvalidRecord);

  nn::ParamList<float> params{{"w", nn::Tensor<float>::zeros({2, 3}, true)}};
  EXPECT_THROW(nn::load_into(params, t, true), InvalidArgument);
  EXPECT_NO_THROW(nn::load_into(params, t, false));
  EXPECT_EQ(params[0].tensor.at(5), 6.0f);
  nn::ParamList<float> wrong{{"w", nn::Tensor<float>::zeros({3, 2}, true)}};
  EXPECT_THROW(nn::load_into(wrong, t, false), InvalidArgument);
}

// Minimal RIFF writer for test inputs.
std::vector<std::uint8_t> riff(std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
                               std::uint16_t bits, const std::vector<std::uint8_t>& data,
                               bool extra_chunk = false) {
  io::ByteWriter w;
  w.put_bytes("RIFF");
  w.put<std::uint32_t>(0);
  w.put_bytes("WAVE");
  if (extra_chunk) {
    w.put_bytes("LIST");
    w.put<std::uint32_t>(3);
    w.put_bytes("abc");
    w.put<std::uint8_t>(0);  // pad byte
  }
  w.put_bytes("fmt ");
  w.put<std::uint32_t>(16);
  w.put<std::uint16_t>(format);
  w.put<std::uint16_t>(channels);
  w.put<std::uint32_t>(rate);
  w.put<std::uint32_t>(rate * channels * bits / 8);
  w.put<std::uint16_t>(static_cast<std::uint16_t>(channels * bits / 8));
  w.put<std::uint16_t>(bits);
  w.put_bytes("data");
  w.put<std::uint32_t>(static_cast<std::uint32_t>(data.size()));
  auto out = w.bytes();
  out.insert(out.end(), data.begin(), data.end());
  const auto riff_size = static_cast<std::uint32_t>(out.size() - 8);
  std::memcpy(out.data() + 4, &riff_size, 4);
  return out;
}

std::vector<std::uint8_t> pcm16(const std::vector<std::int16_t>& v) {
  std::vector<std::uint8_t> out(v.size() * 2);
  std::memcpy(out.data(), v.data(), out.size());
  return out;
}

TEST(Wav, Pcm16MonoScaling) {
  const auto w = audio::decode_wav(riff(1, 1, 22050, 16, pcm16({0, 16384, -32768, 32767})));
  EXPECT_EQ(w.sample_rate, 22050);
  ASSERT_EQ(w.size(), 4u);
  EXPECT_EQ(w.samples[1], 0.5);
  EXPECT_EQ(w.samples[2], -1.0);
  EXPECT_EQ(w.samples[3], 32767.0 / 32768.0);
}

TEST(Wav, StereoWithIdenticalChannelsEqualsMono) {
  const auto mono = audio::decode_wav(riff(1, 1, 8000, 16, pcm16({100, -200, 300})));
  const auto stereo =
      audio::decode_wav(riff(1, 2, 8000, 16, pcm16({100, 100, -200, -200, 300, 300})));
  EXPECT_EQ(mono.samples, stereo.samples);
}

TEST(Wav, Float32AndSkippedChunks) {
  const std::vector<float> v{0.25f, -0.75f};
  std::vector<std::uint8_t> data(8);
  std::memcpy(data.data(), v.data(), 8);
  const auto w = audio::decode_wav(riff(3, 1, 16000, 32, data, true));
  EXPECT_EQ(w.samples, (std::vector<double>{0.25, -0.75}));
}

TEST(Wav, ErrorsNameTheChunk) {
  auto compressed = riff(2, 1, 8000, 4, pcm16({1, 2}));
  try {
    audio::decode_wav(compressed);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), Kind::kUnsupportedEncoding);
    EXPECT_NE(std::string(e.what()).find("fmt"), std::string::npos);
  }
  auto truncated = riff(1, 1, 8000, 16, pcm16({1, 2, 3, 4}));
  truncated.resize(truncated.size() - 3);
  try {
    audio::decode_wav(truncated);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), Kind::kTruncated);
    EXPECT_NE(std::string(e.what()).find("data"), std::string::npos);
  }
  auto not_riff = riff(1, 1, 8000, 16, pcm16({1}));
  not_riff[0] = 'X';
  EXPECT_EQ(error_kind([&] { audio::decode_wav(not_riff); }), Kind::kBadMagic);
}

TEST(Wav, WriteReadRoundTripAndResample) {
  dsp::Waveform w;
  w.sample_rate = 8000;
  for (int i = 0; i < 800; ++i) w.samples.push_back(std::sin(i * 0.05) * 0.5);
  testutil::TempDir dir("wav");
  audio::write_wav(dir / "a.wav", w);
  const auto r = audio::read_wav(dir / "a.wav");
  ASSERT_EQ(r.size(), w.size());
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(r.samples[i], w.samples[i], 1.0 / 32768);

  const auto up = audio::read_wav(dir / "a.wav", 16000);
  EXPECT_EQ(up.sample_rate, 16000);
  EXPECT_EQ(up.size(), 1600u);
  const auto same = audio::resample_linear(w, 8000);
  EXPECT_EQ(same.samples, w.samples);
}

}  // namespace
