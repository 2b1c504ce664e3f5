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

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "geat/corpus.hpp"
#include "geat/model.hpp"

namespace geat {

/// Portable named-tensor container. Layout: 8-byte magic "GEATCKPT",
/// 4-byte little-endian version, 8-byte header length, UTF-8 JSON header
/// (model kind, config, lab vocab, tensor directory), then raw
/// little-endian IEEE-754 float32 blobs in directory order.
struct Checkpoint {
  std::string kind;  // "triplet" or "classifier"
  ModelConfig config;
  LabVocab lab_vocab;
  std::vector<std::pair<std::string, Tensor>> tensors;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

Checkpoint to_checkpoint(const TripletParams& p, const LabVocab& vocab);
Checkpoint to_checkpoint(const ClassifierParams& p, const LabVocab& vocab);
TripletParams triplet_from_checkpoint(const Checkpoint& ckpt);
ClassifierParams classifier_from_checkpoint(const Checkpoint& ckpt);

}  // namespace geat
