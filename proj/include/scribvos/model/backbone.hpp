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

#include <memory>

#include "scribvos/datamodel.hpp"
#include "scribvos/nn/module.hpp"

namespace scribvos {

/// Multi-scale features for one padded frame: F at stride 16 (the matching
/// feature), plus the stride-8/stride-4 taps consumed by the segmentation
/// heads' skip connections.
struct FeaturePyramid {
    nn::Var F;  // [H/16, W/16, c]
    nn::Var f8; // [H/8,  W/8,  c8]
    nn::Var f4; // [H/4,  W/4,  c4]
    int H = 0, W = 0;

    int h() const { return F.dim(0); }
    int w() const { return F.dim(1); }
    int c() const { return F.dim(2); }
};

class Backbone {
public:
    virtual ~Backbone() = default;
    virtual FeaturePyramid extract(const Frame& frame) const = 0;
    virtual int channels() const = 0;   // c
    virtual int channels8() const = 0;  // c8
    virtual int channels4() const = 0;  // c4
};

/// Four-block strided conv encoder trained from scratch; the default for
/// every desk-scale run.
class ToyBackbone : public Backbone {
public:
    ToyBackbone(nn::ParamStore& store, int feat_channels, Rng& rng);
    FeaturePyramid extract(const Frame& frame) const override;
    int channels() const override { return m_c; }
    int channels8() const override { return m_c / 2; }
    int channels4() const override { return m_c / 4; }

private:
    int m_c;
    nn::Conv m_b1a, m_b1b, m_b2a, m_b2b, m_b3a, m_b3b, m_b4a, m_b4b, m_proj;
};

/// ResNet-50 trunk (conv1 through the stride-16 stage) with batch-norm
/// folded into the convolutions, plus a 1x1 projection to `feat_channels`.
/// Intended to be loaded from converted pretrained weights through the
/// checkpoint container.
class ResNet50Backbone : public Backbone {
public:
    ResNet50Backbone(nn::ParamStore& store, int feat_channels, Rng& rng);
    FeaturePyramid extract(const Frame& frame) const override;
    int channels() const override { return m_c; }
    int channels8() const override { return 512; }
    int channels4() const override { return 256; }

private:
    struct Bottleneck {
        nn::Conv reduce, spatial, expand;
        nn::Conv shortcut; // defined only when the block changes shape
        bool has_shortcut = false;
    };
    nn::Var run_block(const Bottleneck& block, const nn::Var& x) const;

    int m_c;
    nn::Conv m_stem;
    std::vector<Bottleneck> m_stage1, m_stage2, m_stage3;
    nn::Conv m_proj;
};

std::unique_ptr<Backbone> make_backbone(const std::string& kind, int feat_channels,
                                        nn::ParamStore& store, Rng& rng);

/// Frame pixels as a [H,W,3] constant tensor.
nn::Var frame_to_var(const Frame& frame);

} // namespace scribvos
