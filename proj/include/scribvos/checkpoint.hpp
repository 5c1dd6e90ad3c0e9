// This file is part of the scribvos project, a scribble-initialized video
// object segmentation toolkit.
//
// Copyright 2026 the scribvos authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
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
#include <string>
#include <vector>

namespace scribvos {

/// Self-describing container for model parameters, optimizer state, and
/// run metadata. One file, versioned header, bit-exact double payload.
struct Checkpoint {
    std::uint32_t version = 1;
    std::uint64_t config_fingerprint = 0;
    std::map<std::string, std::vector<std::int32_t>> shapes;
    std::map<std::string, std::vector<double>> tensors;
    std::map<std::string, std::string> metadata;

    void put(const std::string& name, std::vector<std::int32_t> shape, std::vector<double> data);
    const std::vector<double>& tensor(const std::string& name) const;
    bool has(const std::string& name) const { return tensors.count(name) != 0; }
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

} // namespace scribvos
