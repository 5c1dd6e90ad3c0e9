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

#include "scribvos/model/backbone.hpp"
#include "scribvos/nn/module.hpp"

namespace scribvos {

/// Decodes a query representation into a full-resolution foreground
/// probability map: three refinement stages (stride 16 -> 8 -> 4) fusing the
/// backbone skips, 2-channel logits at quarter resolution, x4 bilinear
/// upsampling, per-pixel softmax. Output strictly inside (0,1).
class SegHead {
public:
    SegHead() = default;
    SegHead(nn::ParamStore& store, const std::string& prefix, int channels, int c8, int c4,
            Rng& rng);

    nn::Var segment(const nn::Var& representation, const FeaturePyramid& pyramid) const;

private:
    struct Refine {
        nn::Conv a, b;
    };
    nn::Var run_refine(const Refine& r, const nn::Var& x) const;

    int m_d1 = 0, m_d2 = 0, m_d3 = 0;
    nn::Conv m_entry;
    Refine m_refine1, m_refine2, m_refine3;
    nn::Conv m_skip8, m_skip4;     // 1x1 projections of the pyramid taps
    nn::Conv m_trans1, m_trans2;   // width transitions after fusion
    nn::Conv m_logits;
};

} // namespace scribvos
