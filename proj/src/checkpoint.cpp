// Copyright 2026 The GEAT Authors
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

#include "geat/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace geat {

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs are written as native little-endian floats");

namespace {

constexpr char kMagic[8] = {'G', 'E', 'A', 'T', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

using ordered_json = nlohmann::ordered_json;

ordered_json config_to_json(const ModelConfig& mc) {
  ordered_json j;
  j["vocab_size"] = mc.vocab_size;
  j["max_len"] = mc.max_len;
  j["token_embed_dim"] = mc.token_embed_dim;
  j["kernel_sizes"] = mc.kernel_sizes;
  j["filters_per_kernel"] = mc.filters_per_kernel;
  j["feature_count"] = mc.feature_count;
  j["embed_dim"] = mc.embed_dim;
  j["lab_count"] = mc.lab_count;
  j["hidden_dim"] = mc.hidden_dim;
  j["margin"] = mc.margin;
  return j;
}

ModelConfig config_from_json(const ordered_json& j) {
  ModelConfig mc;
  mc.vocab_size = j.at("vocab_size").get<int64_t>();
  mc.max_len = j.at("max_len").get<int64_t>();
  mc.token_embed_dim = j.at("token_embed_dim").get<int64_t>();
  mc.kernel_sizes = j.at("kernel_sizes").get<std::vector<int64_t>>();
  mc.filters_per_kernel = j.at("filters_per_kernel").get<int64_t>();
  mc.feature_count = j.at("feature_count").get<int64_t>();
  mc.embed_dim = j.at("embed_dim").get<int64_t>();
  mc.lab_count = j.at("lab_count").get<int64_t>();
  mc.hidden_dim = j.at("hidden_dim").get<int64_t>();
  mc.margin = j.at("margin").get<double>();
  return mc;
}

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in, const std::string& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("truncated checkpoint: " + path);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  ordered_json header;
  header["kind"] = ckpt.kind;
  header["config"] = config_to_json(ckpt.config);
  header["lab_vocab"] = ckpt.lab_vocab.names;
  ordered_json dir = ordered_json::array();
  uint64_t offset = 0;
  for (const auto& [name, tensor] : ckpt.tensors) {
    ordered_json entry;
    entry["name"] = name;
    entry["shape"] = tensor.shape;
    entry["dtype"] = "f32";
    entry["offset"] = offset;
    dir.push_back(entry);
    offset += static_cast<uint64_t>(tensor.size()) * sizeof(float);
  }
  header["tensors"] = dir;
  const std::string header_text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_raw(out, kVersion);
  write_raw(out, static_cast<uint64_t>(header_text.size()));
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const auto& [name, tensor] : ckpt.tensors) {
    out.write(reinterpret_cast<const char*>(tensor.ptr()),
              static_cast<std::streamsize>(tensor.size() * sizeof(float)));
  }
  if (!out) throw IoError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError("not a GEAT checkpoint: " + path);
  }
  const auto version = read_raw<uint32_t>(in, path);
  if (version != kVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version) + ": " + path);
  }
  const auto header_len = read_raw<uint64_t>(in, path);
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw IoError("truncated checkpoint header: " + path);

  ordered_json header;
  try {
    header = ordered_json::parse(header_text);
  } catch (const std::exception& e) {
    throw IoError("bad checkpoint header (" + std::string(e.what()) + "): " + path);
  }

  Checkpoint ckpt;
  ckpt.kind = header.at("kind").get<std::string>();
  ckpt.config = config_from_json(header.at("config"));
  ckpt.lab_vocab.names = header.at("lab_vocab").get<std::vector<std::string>>();
  for (const auto& entry : header.at("tensors")) {
    const auto name = entry.at("name").get<std::string>();
    const auto shape = entry.at("shape").get<Shape>();
    if (entry.at("dtype").get<std::string>() != "f32") {
      throw IoError("tensor '" + name + "' has unsupported dtype: " + path);
    }
    Tensor t(shape);
    in.read(reinterpret_cast<char*>(t.ptr()),
            static_cast<std::streamsize>(t.size() * sizeof(float)));
    if (!in) throw IoError("truncated tensor '" + name + "': " + path);
    ckpt.tensors.emplace_back(name, std::move(t));
  }
  return ckpt;
}

Checkpoint to_checkpoint(const TripletParams& p, const LabVocab& vocab) {
  if (vocab.count() != p.config.lab_count) {
    throw ValidationError("checkpoint: lab vocab size does not match config lab_count");
  }
  return Checkpoint{"triplet", p.config, vocab, named_tensors(p)};
}

Checkpoint to_checkpoint(const ClassifierParams& p, const LabVocab& vocab) {
  if (vocab.count() != p.config.lab_count) {
    throw ValidationError("checkpoint: lab vocab size does not match config lab_count");
  }
  return Checkpoint{"classifier", p.config, vocab, named_tensors(p)};
}

TripletParams triplet_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.kind != "triplet") {
    throw ValidationError("checkpoint holds a '" + ckpt.kind + "' model, expected triplet");
  }
  return triplet_from_tensors(ckpt.config, ckpt.tensors);
}

ClassifierParams classifier_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.kind != "classifier") {
    throw ValidationError("checkpoint holds a '" + ckpt.kind + "' model, expected classifier");
  }
  return classifier_from_tensors(ckpt.config, ckpt.tensors);
}

}  // namespace geat
