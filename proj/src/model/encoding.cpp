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

#include "scribvos/model/encoding.hpp"


namespace scribvos {

using nn::Var;

BinaryMask binarize_scribble_patches(const BinaryMask& scribble, int patch) {
    if (scribble.h % patch != 0 || scribble.w % patch != 0)
        throw InvalidInput("scribble dimensions are not multiples of the patch size");
    BinaryMask out(scribble.h / patch, scribble.w / patch);
    for (int y = 0; y < scribble.h; ++y)
        for (int x = 0; x < scribble.w; ++x)
            if (scribble.at(y, x)) out.at(y / patch, x / patch) = 1;
    return out;
}

Var downsample_scribble_similarity(const BinaryMask& scribble, const Var& f0, int patch) {
    const BinaryMask bd = binarize_scribble_patches(scribble, patch);
    if (bd.count() == 0) throw EmptyMask("scribble touches no patch");
    const int h = f0.dim(0), w = f0.dim(1), c = f0.dim(2);
    if (bd.h != h || bd.w != w)
        throw InvalidInput("scribble patch grid does not match the feature grid");

    std::vector<double> weights(bd.values.begin(), bd.values.end());
    const Var tokens = nn::reshape(f0, {h * w, c});
    const Var pooled = nn::weighted_row_mean(tokens, weights); // g_s

    constexpr double eps = 1e-12;
    const Var dots = nn::matmul(tokens, nn::reshape(pooled, {c, 1}));              // [hw,1]
    const Var row_sq = nn::matmul(nn::mul(tokens, tokens), Var::full({c, 1}, 1.0)); // [hw,1]
    const Var row_norm = nn::sqrt_(nn::affine(row_sq, 1.0, eps));
    const Var pooled_norm =
        nn::sqrt_(nn::affine(nn::sum(nn::mul(pooled, pooled)), 1.0, eps));          // [1]
    const Var denom = nn::scale_by(row_norm, pooled_norm);
    const Var cosine = nn::div(dots, denom);
    // negative similarity would flip the embedding sign downstream; clamp at 0
    const Var weighted = nn::cmul(nn::relu(cosine), weights);
    return nn::reshape(weighted, {h, w});
}

Var downsample_probability(const Var& q, int patch) {
    if (q.shape().size() != 2) throw InvalidInput("probability map must be rank 2");
    return nn::block_mean(q, patch);
}

MemoryEncoder::MemoryEncoder(nn::ParamStore& store, int channels, int heads,
                             bool shared_embedding, Rng& rng)
    : m_c(channels) {
    m_norm = nn::LayerNormLayer(store, "encoder.norm", channels, rng);
    m_attn = nn::MultiHeadAttention(store, "encoder.attn", channels, heads, rng);
    // the embeddings start at feature scale (std 0.5) so the level signal is
    // readable by the matchers from the first step on
    auto make_embedding = [&](const char* name) {
        Var e = store.create(name, {channels}, nn::Init::normal_small, rng);
        for (auto& v : e.mutable_value()) v *= 0.5 / 0.02;
        return e;
    };
    m_e_scribble = make_embedding("encoder.e_scribble");
    if (shared_embedding) {
        // ablation: one embedding tags every level
        m_e_reliable = m_e_scribble;
        m_e_entire = m_e_scribble;
    } else {
        m_e_reliable = make_embedding("encoder.e_reliable");
        m_e_entire = make_embedding("encoder.e_entire");
    }
}

Var MemoryEncoder::embedding(Level level) const {
    switch (level) {
    case Level::scribble: return m_e_scribble;
    case Level::reliable: return m_e_reliable;
    case Level::entire: return m_e_entire;
    }
    throw InvalidInput("unknown reliability level");
}

Var MemoryEncoder::self_attention(const Var& base) const {
    const int h = base.dim(0), w = base.dim(1);
    const Var tokens = nn::reshape(base, {h * w, m_c});
    const auto& pe = nn::positional_encoding_2d(h, w, m_c);
    const Var normed = m_norm.apply(tokens);
    const Var qk = nn::cadd(normed, pe);
    const Var enhanced = nn::add(tokens, m_attn.apply(qk, qk, normed));
    return nn::reshape(enhanced, {h, w, m_c});
}

Var MemoryEncoder::encode(const Var& map_d, const Var& base, Level level) const {
    const int h = base.dim(0), w = base.dim(1);
    if (map_d.dim(0) != h || map_d.dim(1) != w)
        throw InvalidInput("memory map and base feature disagree on the grid size");
    const Var modulated = nn::outer(nn::reshape(map_d, {h * w}), embedding(level));
    const Var enhanced = nn::reshape(self_attention(base), {h * w, m_c});
    return nn::reshape(nn::add(modulated, enhanced), {h, w, m_c});
}

} // namespace scribvos
