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

#include "scribvos/nn/module.hpp"

namespace scribvos {

/// One transformer-decoder block matching a query feature map against a set
/// of encoded memory frames: pre-norm self-attention on the query,
/// cross-attention with the time-flattened memory as keys/values, then a
/// feed-forward. The reliable and entire levels each own a disjoint
/// instance.
class Matcher {
public:
    Matcher() = default;
    Matcher(nn::ParamStore& store, const std::string& prefix, int channels, int heads, Rng& rng);

    /// query: [h,w,c]; memory: nonempty list of [h,w,c] encoded features.
    nn::Var match(const nn::Var& query, const std::vector<nn::Var>& memory) const;

private:
    int m_c = 0;
    nn::LayerNormLayer m_norm_self, m_norm_cross, m_norm_ff, m_norm_out;
    nn::MultiHeadAttention m_self_attn, m_cross_attn;
    nn::Linear m_ff_in, m_ff_out;
};

} // namespace scribvos
