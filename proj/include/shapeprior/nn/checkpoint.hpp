// shapeprior/nn/checkpoint.hpp
//
// Copyright 2026 the shapeprior authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace shapeprior::nn {

/// One serialized weight tensor (little-endian float32 on disk).
struct TensorBlob {
  std::string name;
  std::vector<int> shape;
  std::vector<float> data;
};

/// Checkpoint directory layout:
///   arch.json       architecture descriptor
///   manifest.json   tensor shapes + content hashes, epoch, loss history
///   <name>.bin      raw little-endian float32 payload per tensor
struct ModelCheckpoint {
  nlohmann::json arch;
  std::map<std::string, TensorBlob> tensors;
  int epoch = 0;
  std::vector<double> loss_history;
};

std::uint64_t fnv1a64(const void* data, size_t bytes);

void save_checkpoint(const std::string& dir, const ModelCheckpoint& ckpt);
ModelCheckpoint load_checkpoint(const std::string& dir);

}  // namespace shapeprior::nn
