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
#include <vector>

#include "scribvos/datamodel.hpp"
#include "scribvos/nn/tensor.hpp"

namespace scribvos {

/// Per-pixel supervision classes for the reliable-region loss.
enum class ReliableLabel : std::int8_t { negative = -1, ignore = 0, positive = 1 };

struct ReliableRegionTarget {
    int h = 0, w = 0;
    std::vector<ReliableLabel> labels;

    ReliableLabel at(int y, int x) const { return labels[static_cast<size_t>(y) * w + x]; }
};

/// positive = scribble; ignore = dilation band of the given radius around
/// it; negative = everything else.
ReliableRegionTarget reliable_region_targets(const ScribbleMap& scribble, int ignore_radius);

/// Focal loss over the non-ignored pixels of a clip, normalized by their
/// count across all frames.
nn::Var focal_loss_reliable(const std::vector<nn::Var>& q_r_seq,
                            const std::vector<ReliableRegionTarget>& targets, double gamma,
                            double alpha_f);

/// Odds-normalized merge of independent per-object maps into an (M+1)-way
/// distribution; row 0 is background. Input maps are [H,W]; output is
/// [M+1, H, W] with per-pixel columns summing to 1.
nn::Var soft_aggregate(const std::vector<nn::Var>& object_maps);

/// One scribble-labeled pixel with its ground-truth identity (0 = background).
struct LabeledPixel {
    int y = 0, x = 0;
    int object_id = 0;
};

/// Cross-entropy at labeled pixels only, normalized by their total count.
nn::Var pce_loss(const std::vector<nn::Var>& aggregated_seq,
                 const std::vector<std::vector<LabeledPixel>>& labels_seq);

/// Edge-aware first-difference penalty: |dQ| weighted by exp(-alpha*|dI|),
/// where |dI| is the channel-mean absolute intensity difference. Normalized
/// by the total pixel count.
nn::Var smoothness_loss(const std::vector<nn::Var>& q_e_seq, const std::vector<Image>& frames,
                        double alpha);

/// Mean squared difference between forward and backward predictions.
nn::Var bpc_loss(const std::vector<nn::Var>& forward_maps,
                 const std::vector<nn::Var>& backward_maps);

struct LossBreakdown {
    double fl = 0.0;
    double pce = 0.0;
    double sn = 0.0;
    double bpc = 0.0;
    double total = 0.0;
};

struct TotalLoss {
    nn::Var var; // scalar, ready for backward()
    LossBreakdown values;
};

/// Weighted sum; absent components (undefined Vars) contribute zero.
/// Throws NonFiniteLoss when any component is not finite.
TotalLoss total_loss(const nn::Var& fl, const nn::Var& pce, const nn::Var& sn, const nn::Var& bpc,
                     double lambda_fl, double lambda_pce, double lambda_sn, double lambda_bpc);

} // namespace scribvos
