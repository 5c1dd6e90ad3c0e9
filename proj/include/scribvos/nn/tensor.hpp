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

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "scribvos/common.hpp"

namespace scribvos::nn {

using Shape = std::vector<int>;

inline std::size_t shape_numel(const Shape& s) {
    std::size_t n = 1;
    for (const int d : s) n *= static_cast<std::size_t>(d);
    return n;
}

/// One vertex of the reverse-mode tape: a value tensor, its (lazily
/// allocated) gradient, and the closure that scatters the gradient to the
/// parents. Double precision throughout.
struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward_fn;

    std::size_t numel() const { return value.size(); }
    void ensure_grad() {
        if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
    }
};

/// Handle to a graph node. Copying a Var shares the node.
class Var {
public:
    Var() = default;
    explicit Var(std::shared_ptr<Node> n) : m_node(std::move(n)) {}

    static Var leaf(Shape shape, std::vector<double> data, bool requires_grad = false);
    static Var zeros(Shape shape, bool requires_grad = false);
    static Var full(Shape shape, double fill);
    static Var scalar(double v) { return full({1}, v); }

    bool defined() const { return m_node != nullptr; }
    const Shape& shape() const { return m_node->shape; }
    int dim(int i) const { return m_node->shape[i]; }
    std::size_t numel() const { return m_node->numel(); }
    const std::vector<double>& value() const { return m_node->value; }
    std::vector<double>& mutable_value() { return m_node->value; }
    const std::vector<double>& grad() const { return m_node->grad; }
    bool requires_grad() const { return m_node->requires_grad; }
    double item() const { return m_node->value.at(0); }
    std::shared_ptr<Node> node() const { return m_node; }
    void zero_grad() { m_node->grad.assign(m_node->value.size(), 0.0); }

    /// Value copy cut off from the tape.
    Var detach() const;

private:
    std::shared_ptr<Node> m_node;
};

/// While a NoGradGuard is alive, ops record no parents and no closures, so
/// graphs stay flat and memory stays bounded (inference mode).
bool grad_enabled();
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;
private:
    bool m_prev;
};

/// Reverse pass from a scalar loss; accumulates into every reachable
/// grad-requiring node.
void backward(const Var& loss);

// ---- elementwise ----
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);
Var affine(const Var& a, double scale, double shift); // scale*a + shift
Var neg(const Var& a);
Var relu(const Var& a);
Var exp_(const Var& a);
Var log_(const Var& a);
Var abs_(const Var& a);
Var sqrt_(const Var& a);
Var pow_(const Var& a, double p);           // a >= 0 expected
Var clamp(const Var& a, double lo, double hi); // gradient passes strictly inside
Var cmul(const Var& a, const std::vector<double>& weights); // constant weights
Var cadd(const Var& a, const std::vector<double>& values);  // constant values

// ---- shape ----
Var reshape(const Var& a, Shape shape);
Var transpose(const Var& a);                 // [m,n] -> [n,m]
Var concat_rows(const std::vector<Var>& parts);
Var slice_rows(const Var& a, int r0, int r1);
Var slice_cols(const Var& a, int c0, int c1);
Var concat_cols(const std::vector<Var>& parts);

// ---- reductions / broadcast ----
Var sum(const Var& a);                       // -> [1]
Var mean(const Var& a);                      // -> [1]
Var scale_by(const Var& a, const Var& s);    // s is [1]
Var add_rowvec(const Var& a, const Var& v);  // [n,c] + [c]
Var outer(const Var& col, const Var& row);   // [n] x [c] -> [n,c]
Var weighted_row_mean(const Var& a, const std::vector<double>& w); // [n,c] -> [c]

// ---- nn primitives ----
Var matmul(const Var& a, const Var& b);
Var softmax_rows(const Var& a);
Var layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps = 1e-5);

/// x: [h,w,cin], weight: [kh,kw,cin,cout], bias: [cout] (optional, may be
/// undefined). Zero padding.
Var conv2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad);
Var max_pool2d(const Var& x, int kernel, int stride, int pad);
Var upsample_bilinear(const Var& x, int out_h, int out_w); // [h,w,c] -> [oh,ow,c]
Var block_mean(const Var& x, int block);                   // [h,w] or [h,w,c]

bool all_finite(const Var& a);

namespace detail {
/// Shared node constructor: records parents and the closure only when grad
/// mode is on and some parent requires grad.
std::shared_ptr<Node> make_node(Shape shape, std::vector<double> value,
                                std::vector<std::shared_ptr<Node>> parents,
                                std::function<void(Node&)> backward_fn);
} // namespace detail

} // namespace scribvos::nn
