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
#include <string>
#include <vector>

#include "scribvos/model/model.hpp"

namespace scribvos {

struct InferenceOptions {
    int memory_capacity = 4;
    int update_period = 6;
    bool dump_prob_maps = false;
    bool keep_bank_trace = false;
};

struct InferenceResult {
    std::map<int, LabelMask> masks;                      // per frame, original extent
    std::map<int, std::map<int, ProbabilityMap>> probs;  // [frame][object] Q_e (when dumped)
    std::vector<std::string> bank_trace;                 // per-frame bank state lines
    int feature_extractions = 0;
};

/// Runs the full per-frame inference loop over a sequence: features once per
/// frame, per-object two-step prediction against that object's memory bank,
/// soft aggregation and argmax over background + objects, periodic memory
/// updates relative to each object's first appearance. Background scribbles
/// (index 255) are accepted and ignored.
InferenceResult run_sequence(const Model& model, const VideoSequence& seq,
                             const InferenceOptions& options);

/// Writes one indexed-palette PNG per frame under `<out_root>/<seq_name>/`.
void emit_results(const std::map<int, LabelMask>& masks, const std::string& out_root,
                  const std::string& seq_name);

} // namespace scribvos
