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

#include "scribvos/model/backbone.hpp"

namespace scribvos {

using nn::Var;

Var frame_to_var(const Frame& frame) {
    return Var::leaf({frame.image.h, frame.image.w, 3}, frame.image.data);
}

namespace {

void check_padded(const Frame& frame) {
    if (frame.image.h % 16 != 0 || frame.image.w % 16 != 0)
        throw InvalidInput("frame is not padded to a multiple of 16");
}

} // namespace

// ------------------------------------------------------------- ToyBackbone

ToyBackbone::ToyBackbone(nn::ParamStore& store, int feat_channels, Rng& rng) : m_c(feat_channels) {
    const int w1 = m_c / 8, w2 = m_c / 4, w3 = m_c / 2, w4 = m_c / 2;
    m_b1a = nn::Conv(store, "backbone.b1a", 3, 3, 3, w1, 2, 1, rng);
    m_b1b = nn::Conv(store, "backbone.b1b", 3, 3, w1, w1, 1, 1, rng);
    m_b2a = nn::Conv(store, "backbone.b2a", 3, 3, w1, w2, 2, 1, rng);
    m_b2b = nn::Conv(store, "backbone.b2b", 3, 3, w2, w2, 1, 1, rng);
    m_b3a = nn::Conv(store, "backbone.b3a", 3, 3, w2, w3, 2, 1, rng);
    m_b3b = nn::Conv(store, "backbone.b3b", 3, 3, w3, w3, 1, 1, rng);
    m_b4a = nn::Conv(store, "backbone.b4a", 3, 3, w3, w4, 2, 1, rng);
    m_b4b = nn::Conv(store, "backbone.b4b", 3, 3, w4, w4, 1, 1, rng);
    m_proj = nn::Conv(store, "backbone.proj", 1, 1, w4, m_c, 1, 0, rng);
}

FeaturePyramid ToyBackbone::extract(const Frame& frame) const {
    check_padded(frame);
    const Var x = affine(frame_to_var(frame), 2.0, -1.0); // [0,1] -> [-1,1]

    const Var s2 = relu(m_b1b.apply(relu(m_b1a.apply(x))));
    const Var s4 = relu(m_b2b.apply(relu(m_b2a.apply(s2))));
    const Var s8 = relu(m_b3b.apply(relu(m_b3a.apply(s4))));
    const Var s16 = relu(m_b4b.apply(relu(m_b4a.apply(s8))));

    FeaturePyramid pyr;
    pyr.F = m_proj.apply(s16);
    pyr.f8 = s8;
    pyr.f4 = s4;
    pyr.H = frame.image.h;
    pyr.W = frame.image.w;
    return pyr;
}

// --------------------------------------------------------- ResNet50Backbone

ResNet50Backbone::ResNet50Backbone(nn::ParamStore& store, int feat_channels, Rng& rng)
    : m_c(feat_channels) {
    m_stem = nn::Conv(store, "backbone.stem", 7, 7, 3, 64, 2, 3, rng);

    auto make_stage = [&](const std::string& prefix, int blocks, int in_ch, int mid, int out_ch,
                          int first_stride) {
        std::vector<Bottleneck> stage;
        for (int i = 0; i < blocks; ++i) {
            const std::string p = prefix + "." + std::to_string(i);
            const int stride = (i == 0) ? first_stride : 1;
            const int cin = (i == 0) ? in_ch : out_ch;
            Bottleneck b;
            b.reduce = nn::Conv(store, p + ".reduce", 1, 1, cin, mid, 1, 0, rng);
            b.spatial = nn::Conv(store, p + ".spatial", 3, 3, mid, mid, stride, 1, rng);
            b.expand = nn::Conv(store, p + ".expand", 1, 1, mid, out_ch, 1, 0, rng);
            if (i == 0) {
                b.shortcut = nn::Conv(store, p + ".shortcut", 1, 1, cin, out_ch, stride, 0, rng);
                b.has_shortcut = true;
            }
            stage.push_back(std::move(b));
        }
        return stage;
    };
    m_stage1 = make_stage("backbone.stage1", 3, 64, 64, 256, 1);
    m_stage2 = make_stage("backbone.stage2", 4, 256, 128, 512, 2);
    m_stage3 = make_stage("backbone.stage3", 6, 512, 256, 1024, 2);
    m_proj = nn::Conv(store, "backbone.proj", 1, 1, 1024, m_c, 1, 0, rng);
}

Var ResNet50Backbone::run_block(const Bottleneck& block, const Var& x) const {
    Var y = relu(block.reduce.apply(x));
    y = relu(block.spatial.apply(y));
    y = block.expand.apply(y);
    const Var skip = block.has_shortcut ? block.shortcut.apply(x) : x;
    return relu(add(y, skip));
}

FeaturePyramid ResNet50Backbone::extract(const Frame& frame) const {
    check_padded(frame);
    // the usual channel statistics, folded into the input transform
    Var x = frame_to_var(frame);
    std::vector<double> shifted(x.numel());
    const double mean[3] = {0.485, 0.456, 0.406}, stdev[3] = {0.229, 0.224, 0.225};
    for (size_t i = 0; i < shifted.size(); ++i)
        shifted[i] = (x.value()[i] - mean[i % 3]) / stdev[i % 3];
    x = Var::leaf(x.shape(), std::move(shifted));

    Var y = relu(m_stem.apply(x));
    y = nn::max_pool2d(y, 3, 2, 1);
    for (const auto& b : m_stage1) y = run_block(b, y);
    const Var s4 = y;
    for (const auto& b : m_stage2) y = run_block(b, y);
    const Var s8 = y;
    for (const auto& b : m_stage3) y = run_block(b, y);

    FeaturePyramid pyr;
    pyr.F = m_proj.apply(y);
    pyr.f8 = s8;
    pyr.f4 = s4;
    pyr.H = frame.image.h;
    pyr.W = frame.image.w;
    return pyr;
}

std::unique_ptr<Backbone> make_backbone(const std::string& kind, int feat_channels,
                                        nn::ParamStore& store, Rng& rng) {
    if (kind == "toy") return std::make_unique<ToyBackbone>(store, feat_channels, rng);
    if (kind == "resnet50") return std::make_unique<ResNet50Backbone>(store, feat_channels, rng);
    throw InvalidInput("unknown backbone '" + kind + "'");
}

} // namespace scribvos
