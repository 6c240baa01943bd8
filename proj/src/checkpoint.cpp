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

#include "arionet/checkpoint.hpp"

#include <limits>
#include <map>

#include "arionet/binary_io.hpp"
#include "arionet/errors.hpp"

namespace arionet::nn {

std::vector<std::uint8_t> encode_checkpoint(const std::vector<CheckpointTensor>& tensors) {
  io::ByteWriter w;
  w.put_bytes(std::string_view(kCheckpointMagic, 4));
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    if (t.name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw InvalidArgument("checkpoint: tensor name too long: " + t.name);
    }
    if (t.dims.size() > std::numeric_limits<std::uint8_t>::max()) {
      throw InvalidArgument("checkpoint: rank too large for " + t.name);
    }
    std::size_t n = 1;
    for (auto d : t.dims) n *= d;
    if (n != t.data.size()) {
      throw InvalidArgument("checkpoint: data size does not match dims for " + t.name);
    }
    w.put<std::uint16_t>(static_cast<std::uint16_t>(t.name.size()));
    w.put_bytes(t.name);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(t.dims.size()));
    for (auto d : t.dims) w.put<std::uint32_t>(d);
    w.put_array<float>(t.data);
  }
  return w.bytes();
}

std::vector<CheckpointTensor> decode_checkpoint(std::vector<std::uint8_t> bytes) {
  io::ByteReader r(std::move(bytes), "checkpoint");
  if (r.remaining() < 4 || r.get_string(4) != std::string(kCheckpointMagic, 4)) {
    throw FormatError(FormatError::Kind::kBadMagic, "checkpoint: bad magic");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw FormatError(FormatError::Kind::kUnsupportedVersion,
                      "checkpoint: unsupported version " + std::to_string(version));
  }
  const auto count = r.get<std::uint32_t>();
  std::vector<CheckpointTensor> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    CheckpointTensor t;
    t.name = r.get_string(r.get<std::uint16_t>());
    const auto rank = r.get<std::uint8_t>();
    std::size_t n = 1;
    for (std::uint8_t d = 0; d < rank; ++d) {
      t.dims.push_back(r.get<std::uint32_t>());
      n *= t.dims.back();
    }
    if (n * sizeof(float) > r.remaining()) {
      throw FormatError(FormatError::Kind::kTruncated,
                        "checkpoint: truncated data for tensor " + t.name);
    }
    t.data.resize(n);
    r.get_array<float>(t.data);
    out.push_back(std::move(t));
  }
  if (!r.at_end()) {
    throw FormatError(FormatError::Kind::kInvalidRecord,
                      "checkpoint: trailing bytes after last tensor");
  }
  return out;
}

void write_checkpoint(const std::filesystem::path& path,
                      const std::vector<CheckpointTensor>& tensors) {
  io::write_file_atomic(path, encode_checkpoint(tensors));
}

std::vector<CheckpointTensor> read_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(io::read_file(path));
}

template <typename T>
std::vector<CheckpointTensor> to_checkpoint(const ParamList<T>& params) {
  std::vector<CheckpointTensor> out;
  out.reserve(params.size());
  for (const auto& p : params) {
    CheckpointTensor t;
    t.name = p.name;
    for (auto d : p.tensor.shape()) t.dims.push_back(static_cast<std::uint32_t>(d));
    const auto v = p.tensor.data();
    t.data.assign(v.begin(), v.end());
    out.push_back(std::move(t));
  }
  return out;
}

template <typename T>
void load_into(ParamList<T>& params, const std::vector<CheckpointTensor>& tensors,
               bool strict) {
  std::map<std::string, const CheckpointTensor*> by_name;
  for (const auto& t : tensors) by_name[t.name] = &t;

  if (strict) {
    std::string unknown;
    for (const auto& t : tensors) {
      bool found = false;
      for (const auto& p : params) found = found || p.name == t.name;
      if (!found) unknown += (unknown.empty() ? "" : ", ") + t.name;
    }
    if (!unknown.empty()) {
      throw InvalidArgument("checkpoint: unknown tensor name(s): " + unknown);
    }
  }

  for (auto& p : params) {
    auto it = by_name.find(p.name);
    if (it == by_name.end()) {
      throw InvalidArgument("checkpoint: missing tensor " + p.name);
    }
    const auto& t = *it->second;
    Shape shape(t.dims.begin(), t.dims.end());
    if (shape != p.tensor.shape()) {
      throw InvalidArgument("checkpoint: tensor " + p.name + " has shape " +
                            shape_str(shape) + ", model expects " +
                            shape_str(p.tensor.shape()));
    }
    auto dst = p.tensor.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<T>(t.data[i]);
  }
}

template std::vector<CheckpointTensor> to_checkpoint<float>(const ParamList<float>&);
template std::vector<CheckpointTensor> to_checkpoint<double>(const ParamList<double>&);
template void load_into<float>(ParamList<float>&, const std::vector<CheckpointTensor>&, bool);
template void load_into<double>(ParamList<double>&, const std::vector<CheckpointTensor>&, bool);

}  // namespace arionet::nn
