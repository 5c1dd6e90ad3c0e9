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

#include "scribvos/datamodel.hpp"
#include "scribvos/nn/module.hpp"

namespace scribvos {

enum class Level { scribble, reliable, entire };

/// Cell (i,j) is 1 iff any scribble pixel falls in the 16x16 patch (i,j).
BinaryMask binarize_scribble_patches(const BinaryMask& scribble, int patch = 16);

/// Weighted downsampled scribble: the binary patch map modulated by the
/// non-negative cosine similarity between each cell's feature and the
/// pooled scribble-region representation. Zero wherever the patch map is
/// zero; values in [0,1].
nn::Var downsample_scribble_similarity(const BinaryMask& scribble, const nn::Var& f0,
                                       int patch = 16);

/// 16x16 block-mean downsample of a dense probability map.
nn::Var downsample_probability(const nn::Var& q, int patch = 16);

/// Injects a downsampled memory map into a feature map: the map scaled by
/// the per-level learnable embedding, added to the self-attention-enhanced
/// base feature. One shared attention layer serves all levels.
class MemoryEncoder {
public:
    MemoryEncoder(nn::ParamStore& store, int channels, int heads, bool shared_embedding, Rng& rng);

    nn::Var encode(const nn::Var& map_d, const nn::Var& base, Level level) const;
    nn::Var self_attention(const nn::Var& base) const; // [h,w,c] -> [h,w,c]
    nn::Var embedding(Level level) const;

private:
    int m_c;
    nn::LayerNormLayer m_norm;
    nn::MultiHeadAttention m_attn;
    nn::Var m_e_scribble, m_e_reliable, m_e_entire;
};

} // namespace scribvos
