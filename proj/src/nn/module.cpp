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

#include "scribvos/nn/module.hpp"

#include <cmath>
#include <mutex>

namespace scribvos::nn {

Var ParamStore::create(const std::string& name, Shape shape, Init init, Rng& rng, int fan_in) {
    if (m_index.count(name)) throw InvalidInput("duplicate parameter '" + name + "'");
    std::vector<double> data(shape_numel(shape));
    switch (init) {
    case Init::zeros:
        break;
    case Init::ones:
        std::fill(data.begin(), data.end(), 1.0);
        break;
    case Init::kaiming: {
        if (fan_in <= 0) throw InvalidInput("kaiming init needs fan_in");
        const double bound = std::sqrt(6.0 / fan_in);
        for (auto& v : data) v = rng.uniform(-bound, bound);
        break;
    }
    case Init::normal_small:
        for (auto& v : data) v = 0.02 * rng.normal();
        break;
    }
    Var var = Var::leaf(std::move(shape), std::move(data), /*requires_grad=*/true);
    m_index.emplace(name, m_items.size());
    m_items.emplace_back(name, var);
    return var;
}

Var ParamStore::get(const std::string& name) const {
    const auto it = m_index.find(name);
    if (it == m_index.end()) throw NotFound("parameter '" + name + "' not registered");
    return m_items[it->second].second;
}

std::vector<Var> ParamStore::all() const {
    std::vector<Var> out;
    out.reserve(m_items.size());
    for (const auto& [name, var] : m_items) out.push_back(var);
    return out;
}

void ParamStore::zero_grad() {
    for (auto& [name, var] : m_items) var.zero_grad();
}

void ParamStore::load_values(const std::map<std::string, std::vector<double>>& values) {
    for (auto& [name, var] : m_items) {
        const auto it = values.find(name);
        if (it == values.end()) throw MalformedData("checkpoint is missing parameter '" + name + "'");
        if (it->second.size() != var.numel())
            throw MalformedData("checkpoint parameter '" + name + "' has the wrong size");
        var.mutable_value() = it->second;
    }
}

Linear::Linear(ParamStore& store, const std::string& prefix, int in, int out, Rng& rng) {
    w = store.create(prefix + ".w", {in, out}, Init::kaiming, rng, in);
    b = store.create(prefix + ".b", {out}, Init::zeros, rng);
}

Conv::Conv(ParamStore& store, const std::string& prefix, int kh, int kw, int cin, int cout,
           int stride_, int pad_, Rng& rng)
    : stride(stride_), pad(pad_) {
    w = store.create(prefix + ".w", {kh, kw, cin, cout}, Init::kaiming, rng, kh * kw * cin);
    b = store.create(prefix + ".b", {cout}, Init::zeros, rng);
}

LayerNormLayer::LayerNormLayer(ParamStore& store, const std::string& prefix, int dim, Rng& rng) {
    gamma = store.create(prefix + ".gamma", {dim}, Init::ones, rng);
    beta = store.create(prefix + ".beta", {dim}, Init::zeros, rng);
}

MultiHeadAttention::MultiHeadAttention(ParamStore& store, const std::string& prefix, int dim_,
                                       int heads_, Rng& rng)
    : heads(heads_), dim(dim_) {
    if (dim % heads != 0) throw InvalidInput("attention dim must be divisible by heads");
    q = Linear(store, prefix + ".q", dim, dim, rng);
    k = Linear(store, prefix + ".k", dim, dim, rng);
    v = Linear(store, prefix + ".v", dim, dim, rng);
    o = Linear(store, prefix + ".o", dim, dim, rng);
}

Var MultiHeadAttention::apply(const Var& query, const Var& key_in, const Var& value_in) const {
    const Var Q = q.apply(query);
    const Var K = k.apply(key_in);
    const Var V = v.apply(value_in);
    const int dh = dim / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    std::vector<Var> head_outputs;
    head_outputs.reserve(heads);
    for (int hidx = 0; hidx < heads; ++hidx) {
        const Var Qh = slice_cols(Q, hidx * dh, (hidx + 1) * dh);
        const Var Kh = slice_cols(K, hidx * dh, (hidx + 1) * dh);
        const Var Vh = slice_cols(V, hidx * dh, (hidx + 1) * dh);
        const Var scores = affine(matmul(Qh, transpose(Kh)), scale, 0.0);
        head_outputs.push_back(matmul(softmax_rows(scores), Vh));
    }
    return o.apply(concat_cols(head_outputs));
}

const std::vector<double>& positional_encoding_2d(int h, int w, int c) {
    static std::map<std::tuple<int, int, int>, std::vector<double>> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto& entry = cache[{h, w, c}];
    if (!entry.empty()) return entry;

    const int half = c / 2; // y gets [0, half), x gets [half, c)
    entry.assign(static_cast<size_t>(h) * w * c, 0.0);
    auto fill_axis = [&](int offset, int n_dims, int pos, double* dst) {
        for (int i = 0; i + 1 < n_dims; i += 2) {
            const double freq = std::pow(10000.0, -static_cast<double>(i) / n_dims);
            dst[offset + i] = std::sin(pos * freq);
            dst[offset + i + 1] = std::cos(pos * freq);
        }
        if (n_dims % 2 == 1)
            dst[offset + n_dims - 1] = std::sin(pos * std::pow(10000.0, -1.0));
    };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double* dst = entry.data() + (static_cast<size_t>(y) * w + x) * c;
            fill_axis(0, half, y, dst);
            fill_axis(half, c - half, x, dst);
        }
    return entry;
}

AdamW::AdamW(std::vector<Var> params, double lr, double weight_decay)
    : m_params(std::move(params)), m_lr(lr), m_wd(weight_decay) {
    m_m.resize(m_params.size());
    m_v.resize(m_params.size());
    for (size_t i = 0; i < m_params.size(); ++i) {
        m_m[i].assign(m_params[i].numel(), 0.0);
        m_v[i].assign(m_params[i].numel(), 0.0);
    }
}

void AdamW::zero_grad() {
    for (auto& p : m_params) p.zero_grad();
}

void AdamW::step() {
    ++m_t;
    const double bc1 = 1.0 - std::pow(m_beta1, static_cast<double>(m_t));
    const double bc2 = 1.0 - std::pow(m_beta2, static_cast<double>(m_t));
    for (size_t i = 0; i < m_params.size(); ++i) {
        auto& p = m_params[i];
        if (p.grad().size() != p.numel()) continue; // never touched by backward
        auto& value = p.mutable_value();
        const auto& grad = p.grad();
        for (size_t j = 0; j < value.size(); ++j) {
            m_m[i][j] = m_beta1 * m_m[i][j] + (1.0 - m_beta1) * grad[j];
            m_v[i][j] = m_beta2 * m_v[i][j] + (1.0 - m_beta2) * grad[j] * grad[j];
            const double mhat = m_m[i][j] / bc1;
            const double vhat = m_v[i][j] / bc2;
            value[j] -= m_lr * (mhat / (std::sqrt(vhat) + m_eps) + m_wd * value[j]);
        }
    }
}

void AdamW::restore(std::int64_t t, std::vector<std::vector<double>> m,
                    std::vector<std::vector<double>> v) {
    if (m.size() != m_params.size() || v.size() != m_params.size())
        throw MalformedData("optimizer state does not match the parameter list");
    for (size_t i = 0; i < m_params.size(); ++i)
        if (m[i].size() != m_params[i].numel() || v[i].size() != m_params[i].numel())
            throw MalformedData("optimizer state tensor size mismatch");
    m_t = t;
    m_m = std::move(m);
    m_v = std::move(v);
}

} // namespace scribvos::nn
