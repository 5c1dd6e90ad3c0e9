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

#include <functional>
#include <optional>
#include <string>

#include "scribvos/losses.hpp"
#include "scribvos/model/model.hpp"

namespace scribvos {

enum class Direction { forward, backward };

/// Per-object predictions for every frame of a clip, ordered by the clip's
/// native frame order regardless of the processing direction.
struct ClipPrediction {
    std::vector<int> object_ids;                 // foreground ids, ascending
    std::vector<std::vector<nn::Var>> q_r;       // [object][frame]
    std::vector<std::vector<nn::Var>> q_e;       // [object][frame]
    std::vector<MemoryBank> final_banks;         // bank state after the last frame
};

/// Builds an L-frame sample from one static image + label mask: independent
/// random affine transforms (rotation <= 20 deg, scale 0.8-1.2, translation
/// <= 10%) plus color jitter, with scribbles synthesized from the
/// transformed masks.
SequenceSample make_stage1_sample(const Image& image, const LabelMask& mask, const Config& cfg,
                                  Rng& rng);

/// Builds a video-stage sample from a window of a stored sequence taking
/// every `stride`-th frame; scribble rasters must be present for every
/// selected frame. Training draws random strides so matching is learned
/// across larger displacements than adjacent frames offer.
SequenceSample make_video_sample(const VideoSequence& seq, int start, int length, int stride = 1);

/// Runs the model through the clip with dynamic memory (update period 1,
/// capacity = clip length). The backward direction initializes from the
/// last frame's scribble.
ClipPrediction forward_clip(const Model& model, const SequenceSample& sample, Direction direction);

/// One optimizer step over a batch: forward + (in the video stage) backward
/// passes, random gradient stopping on one direction for the consistency
/// term, weighted total loss, gradient accumulation across the batch.
LossBreakdown train_step(Model& model, const std::vector<SequenceSample>& batch,
                         nn::AdamW& optimizer, const Config& cfg, Rng& rng);

struct TrainResult {
    std::string checkpoint_path;
    std::int64_t steps = 0;
    double first_loss = 0.0;
    double last_loss = 0.0;
};

/// Full training driver: iterates epochs over the dataset, follows the
/// stage's LR schedule, logs per-step loss breakdowns to
/// `<out_dir>/loss_log.tsv`, and writes `<out_dir>/model.ckpt` (parameters +
/// optimizer state + step counter, resumable).
TrainResult run_training(const Config& cfg, const std::string& dataset_root,
                         const std::string& out_dir,
                         const std::optional<std::string>& resume_path = std::nullopt,
                         int windows_per_clip = 2,
                         const std::function<void(std::int64_t, const LossBreakdown&)>& on_step = {});

} // namespace scribvos
