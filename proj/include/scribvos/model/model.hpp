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

#include <map>
#include <memory>
#include <string>

#include "scribvos/checkpoint.hpp"
#include "scribvos/config.hpp"
#include "scribvos/model/backbone.hpp"
#include "scribvos/model/encoding.hpp"
#include "scribvos/model/matching.hpp"
#include "scribvos/model/membank.hpp"
#include "scribvos/model/seghead.hpp"

namespace scribvos {

struct PredictOutput {
    nn::Var q_r;    // [H,W] reliable-region probability (undefined in single-step mode)
    nn::Var q_e;    // [H,W] entire-target probability
    nn::Var e_r_q;  // encoded query feature (undefined in single-step mode)
};

/// The full segmentation model: backbone, memory encoder with level
/// embeddings, the two matchers, and the two heads. Prediction expands
/// step-wise: locate the region matching the initial scribble first, then
/// grow it to the whole target using every memory level.
class Model {
public:
    Model(const Config& cfg, std::uint64_t init_seed);

    FeaturePyramid extract(const Frame& frame) const;

    /// Capacity <= 0 means the configured memory capacity.
    MemoryBank init_bank(const FeaturePyramid& f0, const ScribbleMap& scribble,
                         int capacity = 0) const;

    /// Two-step prediction for one query frame (memory is read, not written).
    PredictOutput predict(const MemoryBank& bank, const FeaturePyramid& pyramid) const;

    /// Encodes the new predictions and appends them to the bank.
    void update_bank(MemoryBank& bank, const PredictOutput& out, const FeaturePyramid& pyramid,
                     int frame_index) const;

    nn::ParamStore& params() { return m_params; }
    const nn::ParamStore& params() const { return m_params; }
    const Config& config() const { return m_config; }
    const MemoryEncoder& encoder() const { return *m_encoder; }
    const Matcher& matcher_reliable() const { return m_matcher_r; }
    const Matcher& matcher_entire() const { return m_matcher_e; }
    const SegHead& head_reliable() const { return m_head_r; }
    const SegHead& head_entire() const { return m_head_e; }

    /// Checkpoint round trip. Load reconstructs the model from the config
    /// text embedded in the file.
    void save(const std::string& path, std::map<std::string, std::string> metadata = {}) const;
    static std::pair<std::unique_ptr<Model>, Checkpoint> load(const std::string& path);

private:
    Config m_config;
    nn::ParamStore m_params;
    std::unique_ptr<Backbone> m_backbone;
    std::unique_ptr<MemoryEncoder> m_encoder;
    Matcher m_matcher_r, m_matcher_e;
    SegHead m_head_r, m_head_e;
};

} // namespace scribvos
