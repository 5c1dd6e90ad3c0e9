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

#include <map>
#include <string>
#include <vector>

#include "scribvos/nn/tensor.hpp"
#include "scribvos/rng.hpp"

namespace scribvos::nn {

enum class Init { zeros, ones, kaiming, normal_small };

/// Ordered registry of named trainable tensors; the unit of checkpointing
/// and optimization.
class ParamStore {
public:
    Var create(const std::string& name, Shape shape, Init init, Rng& rng, int fan_in = 0);
    Var get(const std::string& name) const;
    bool contains(const std::string& name) const { return m_index.count(name) != 0; }
    const std::vector<std::pair<std::string, Var>>& items() const { return m_items; }
    std::vector<Var> all() const;
    void zero_grad();

    /// Overwrites parameter values from a name->data map (checkpoint load).
    void load_values(const std::map<std::string, std::vector<double>>& values);

private:
    std::vector<std::pair<std::string, Var>> m_items;
    std::map<std::string, size_t> m_index;
};

struct Linear {
    Var w, b;
    Linear() = default;
    Linear(ParamStore& store, const std::string& prefix, int in, int out, Rng& rng);
    Var apply(const Var& x) const { return add_rowvec(matmul(x, w), b); }
};

struct Conv {
    Var w, b;
    int stride = 1, pad = 0;
    Conv() = default;
    Conv(ParamStore& store, const std::string& prefix, int kh, int kw, int cin, int cout,
         int stride, int pad, Rng& rng);
    Var apply(const Var& x) const { return conv2d(x, w, b, stride, pad); }
};

struct LayerNormLayer {
    Var gamma, beta;
    LayerNormLayer() = default;
    LayerNormLayer(ParamStore& store, const std::string& prefix, int dim, Rng& rng);
    Var apply(const Var& x) const { return layer_norm(x, gamma, beta); }
};

/// Standard multi-head attention over token matrices.
struct MultiHeadAttention {
    Linear q, k, v, o;
    int heads = 8, dim = 0;
    MultiHeadAttention() = default;
    MultiHeadAttention(ParamStore& store, const std::string& prefix, int dim, int heads, Rng& rng);
    Var apply(const Var& query, const Var& key_in, const Var& value_in) const;
};

/// Fixed 2D sinusoidal positional encoding, one half of the channels per
/// axis; cached per (h,w,c). Returned as a constant [h*w, c] table.
const std::vector<double>& positional_encoding_2d(int h, int w, int c);

/// Decoupled weight decay Adam.
class AdamW {
public:
    AdamW(std::vector<Var> params, double lr, double weight_decay);
    void set_lr(double lr) { m_lr = lr; }
    double lr() const { return m_lr; }
    void step();
    void zero_grad();

    std::int64_t step_count() const { return m_t; }
    // state accessors for checkpointing
    const std::vector<std::vector<double>>& m_state() const { return m_m; }
    const std::vector<std::vector<double>>& v_state() const { return m_v; }
    void restore(std::int64_t t, std::vector<std::vector<double>> m,
                 std::vector<std::vector<double>> v);

private:
    std::vector<Var> m_params;
    std::vector<std::vector<double>> m_m, m_v;
    double m_lr, m_wd;
    double m_beta1 = 0.9, m_beta2 = 0.999, m_eps = 1e-8;
    std::int64_t m_t = 0;
};

} // namespace scribvos::nn
