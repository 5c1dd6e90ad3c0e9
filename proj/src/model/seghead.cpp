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

#include "scribvos/model/seghead.hpp"

namespace scribvos {

using nn::Var;

SegHead::SegHead(nn::ParamStore& store, const std::string& prefix, int channels, int c8, int c4,
                 Rng& rng) {
    m_d1 = channels;
    m_d2 = channels / 2;
    m_d3 = channels / 4;
    m_entry = nn::Conv(store, prefix + ".entry", 1, 1, channels, m_d1, 1, 0, rng);
    m_refine1 = {nn::Conv(store, prefix + ".refine1a", 3, 3, m_d1, m_d1, 1, 1, rng),
                 nn::Conv(store, prefix + ".refine1b", 3, 3, m_d1, m_d1, 1, 1, rng)};
    m_skip8 = nn::Conv(store, prefix + ".skip8", 1, 1, c8, m_d1, 1, 0, rng);
    m_trans1 = nn::Conv(store, prefix + ".trans1", 1, 1, m_d1, m_d2, 1, 0, rng);
    m_refine2 = {nn::Conv(store, prefix + ".refine2a", 3, 3, m_d2, m_d2, 1, 1, rng),
                 nn::Conv(store, prefix + ".refine2b", 3, 3, m_d2, m_d2, 1, 1, rng)};
    m_skip4 = nn::Conv(store, prefix + ".skip4", 1, 1, c4, m_d2, 1, 0, rng);
    m_trans2 = nn::Conv(store, prefix + ".trans2", 1, 1, m_d2, m_d3, 1, 0, rng);
    m_refine3 = {nn::Conv(store, prefix + ".refine3a", 3, 3, m_d3, m_d3, 1, 1, rng),
                 nn::Conv(store, prefix + ".refine3b", 3, 3, m_d3, m_d3, 1, 1, rng)};
    m_logits = nn::Conv(store, prefix + ".logits", 1, 1, m_d3, 2, 1, 0, rng);
}

Var SegHead::run_refine(const Refine& r, const Var& x) const {
    return nn::relu(nn::add(x, r.b.apply(nn::relu(r.a.apply(x)))));
}

Var SegHead::segment(const Var& representation, const FeaturePyramid& pyramid) const {
    const int h = representation.dim(0), w = representation.dim(1);
    if (h != pyramid.h() || w != pyramid.w())
        throw InvalidInput("representation grid does not match the pyramid");

    Var x = m_entry.apply(representation);
    x = run_refine(m_refine1, x);
    x = nn::upsample_bilinear(x, 2 * h, 2 * w);
    x = nn::add(x, m_skip8.apply(pyramid.f8));
    x = nn::relu(m_trans1.apply(x));

    x = run_refine(m_refine2, x);
    x = nn::upsample_bilinear(x, 4 * h, 4 * w);
    x = nn::add(x, m_skip4.apply(pyramid.f4));
    x = nn::relu(m_trans2.apply(x));

    x = run_refine(m_refine3, x);
    Var logits = m_logits.apply(x);                                // [H/4, W/4, 2]
    logits = nn::upsample_bilinear(logits, pyramid.H, pyramid.W);  // [H, W, 2]
    const Var probs = nn::softmax_rows(nn::reshape(logits, {pyramid.H * pyramid.W, 2}));
    const Var foreground = nn::slice_cols(probs, 1, 2);
    // the (0,1) map contract must survive rounding of saturated softmaxes
    return nn::clamp(nn::reshape(foreground, {pyramid.H, pyramid.W}), kProbEps, 1.0 - kProbEps);
}

} // namespace scribvos
