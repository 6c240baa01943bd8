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

// Checkpoint container (little-endian):
//   "ARCK" | version u32 = 1 | tensor_count u32
//   per tensor: name_len u16 | name bytes | rank u8 | dims u32 x rank | f32 data

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "arionet/tensor.hpp"

namespace arionet::nn {

inline constexpr char kCheckpointMagic[4] = {'A', 'R', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointTensor {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  bool operator==(const CheckpointTensor&) const = default;
};

std::vector<std::uint8_t> encode_checkpoint(const std::vector<CheckpointTensor>& tensors);
std::vector<CheckpointTensor> decode_checkpoint(std::vector<std::uint8_t> bytes);

void write_checkpoint(const std::filesystem::path& path,
                      const std::vector<CheckpointTensor>& tensors);
std::vector<CheckpointTensor> read_checkpoint(const std::filesystem::path& path);

template <typename T>
std::vector<CheckpointTensor> to_checkpoint(const ParamList<T>& params);

/// Copies checkpoint values into existing parameters. Every parameter must be
/// present with a matching shape; with `strict`, names in the checkpoint that
/// the model does not have are also an error.
template <typename T>
void load_into(ParamList<T>& params, const std::vector<CheckpointTensor>& tensors,
               bool strict = true);

}  // namespace arionet::nn
