// shapeprior/nn_checkpoint.cpp
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

#include "shapeprior/nn/checkpoint.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "shapeprior/errors.hpp"

namespace shapeprior::nn {

namespace fs = std::filesystem;

std::uint64_t fnv1a64(const void* data, size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string hash_hex(const std::vector<float>& data) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(data.data(), data.size() * sizeof(float))));
  return buf;
}

}  // namespace

void save_checkpoint(const std::string& dir, const ModelCheckpoint& ckpt) {
  fs::create_directories(dir);
  {
    std::ofstream arch(fs::path(dir) / "arch.json", std::ios::binary);
    if (!arch) throw IoError("cannot write arch.json in " + dir);
    arch << ckpt.arch.dump(2) << "\n";
  }
  nlohmann::json manifest;
  manifest["epoch"] = ckpt.epoch;
  manifest["loss_history"] = ckpt.loss_history;
  manifest["tensors"] = nlohmann::json::array();
  for (const auto& [name, blob] : ckpt.tensors) {
    const std::string file = name + ".bin";
    std::ofstream out(fs::path(dir) / file, std::ios::binary);
    if (!out) throw IoError("cannot write tensor file " + file + " in " + dir);
    out.write(reinterpret_cast<const char*>(blob.data.data()),
              static_cast<std::streamsize>(blob.data.size() * sizeof(float)));
    manifest["tensors"].push_back({{"name", name},
                                   {"file", file},
                                   {"shape", blob.shape},
                                   {"fnv1a64", hash_hex(blob.data)}});
  }
  std::ofstream mf(fs::path(dir) / "manifest.json", std::ios::binary);
  if (!mf) throw IoError("cannot write manifest.json in " + dir);
  mf << manifest.dump(2) << "\n";
}

ModelCheckpoint load_checkpoint(const std::string& dir) {
  ModelCheckpoint ckpt;
  {
    std::ifstream arch(fs::path(dir) / "arch.json");
    if (!arch) throw IoError("missing arch.json in " + dir);
    arch >> ckpt.arch;
  }
  nlohmann::json manifest;
  {
    std::ifstream mf(fs::path(dir) / "manifest.json");
    if (!mf) throw IoError("missing manifest.json in " + dir);
    mf >> manifest;
  }
  ckpt.epoch = manifest.at("epoch").get<int>();
  ckpt.loss_history = manifest.at("loss_history").get<std::vector<double>>();
  for (const auto& entry : manifest.at("tensors")) {
    TensorBlob blob;
    blob.name = entry.at("name").get<std::string>();
    blob.shape = entry.at("shape").get<std::vector<int>>();
    size_t count = 1;
    for (int d : blob.shape) count *= static_cast<size_t>(d);
    const fs::path file = fs::path(dir) / entry.at("file").get<std::string>();
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("missing tensor file " + file.string());
    blob.data.resize(count);
    in.read(reinterpret_cast<char*>(blob.data.data()),
            static_cast<std::streamsize>(count * sizeof(float)));
    if (static_cast<size_t>(in.gcount()) != count * sizeof(float))
      throw IoError("tensor file truncated: " + file.string());
    if (hash_hex(blob.data) != entry.at("fnv1a64").get<std::string>())
      throw IoError("tensor hash mismatch: " + file.string());
    ckpt.tensors.emplace(blob.name, std::move(blob));
  }
  return ckpt;
}

}  // namespace shapeprior::nn
