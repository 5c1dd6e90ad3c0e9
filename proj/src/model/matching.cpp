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

#include "scribvos/model/matching.hpp"

namespace scribvos {

using nn::Var;

Matcher::Matcher(nn::ParamStore& store, const std::string& prefix, int channels, int heads,
                 Rng& rng)
    : m_c(channels) {
    m_norm_self = nn::LayerNormLayer(store, prefix + ".norm_self", channels, rng);
    m_norm_cross = nn::LayerNormLayer(store, prefix + ".norm_cross", channels, rng);
    m_norm_ff = nn::LayerNormLayer(store, prefix + ".norm_ff", channels, rng);
    m_norm_out = nn::LayerNormLayer(store, prefix + ".norm_out", channels, rng);
    m_self_attn = nn::MultiHeadAttention(store, prefix + ".self_attn", channels, heads, rng);
    m_cross_attn = nn::MultiHeadAttention(store, prefix + ".cross_attn", channels, heads, rng);
    m_ff_in = nn::Linear(store, prefix + ".ff_in", channels, 4 * channels, rng);
    m_ff_out = nn::Linear(store, prefix + ".ff_out", 4 * channels, channels, rng);
}

Var Matcher::match(const Var& query, const std::vector<Var>& memory) const {
    if (memory.empty()) throw InvalidInput("matcher called with empty memory");
    const int h = query.dim(0), w = query.dim(1);
    if (query.dim(2) != m_c) throw InvalidInput("matcher channel mismatch");
    const auto& pe = nn::positional_encoding_2d(h, w, m_c);

    Var x = nn::reshape(query, {h * w, m_c});
    {
        const Var n = m_norm_self.apply(x);
        const Var qk = nn::cadd(n, pe);
        x = nn::add(x, m_self_attn.apply(qk, qk, n));
    }
    {
        // memory frames flattened along time; per-frame spatial encoding only,
        // so the reference set is order-free
        std::vector<Var> tokens;
        tokens.reserve(memory.size());
        std::vector<double> mem_pe;
        mem_pe.reserve(memory.size() * pe.size());
        for (const auto& m : memory) {
            if (m.dim(0) != h || m.dim(1) != w || m.dim(2) != m_c)
                throw InvalidInput("memory feature grid mismatch");
            tokens.push_back(nn::reshape(m, {h * w, m_c}));
            mem_pe.insert(mem_pe.end(), pe.begin(), pe.end());
        }
        const Var mem = nn::concat_rows(tokens);
        const Var keys = nn::cadd(mem, mem_pe);
        const Var n = m_norm_cross.apply(x);
        x = nn::add(x, m_cross_attn.apply(nn::cadd(n, pe), keys, mem));
    }
    {
        const Var n = m_norm_ff.apply(x);
        x = nn::add(x, m_ff_out.apply(nn::relu(m_ff_in.apply(n))));
    }
    // pre-norm stacks need a terminal norm to bound the residual stream
    return nn::reshape(m_norm_out.apply(x), {h, w, m_c});
}

} // namespace scribvos
