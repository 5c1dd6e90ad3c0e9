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

#include "scribvos/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace scribvos::nn {

namespace {

thread_local bool g_grad_enabled = true;

void check_same_shape(const Var& a, const Var& b, const char* op) {
    if (a.shape() != b.shape())
        throw InvalidInput(std::string(op) + ": operand shapes differ");
}

} // namespace

namespace detail {

std::shared_ptr<Node> make_node(Shape shape, std::vector<double> value,
                                std::vector<std::shared_ptr<Node>> parents,
                                std::function<void(Node&)> backward_fn) {
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->value = std::move(value);
    bool req = false;
    if (g_grad_enabled)
        for (const auto& p : parents) req = req || p->requires_grad;
    if (req) {
        n->requires_grad = true;
        n->parents = std::move(parents);
        n->backward_fn = std::move(backward_fn);
    }
    return n;
}

} // namespace detail

namespace {
using detail::make_node;
} // namespace

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : m_prev(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = m_prev; }

Var Var::leaf(Shape shape, std::vector<double> data, bool requires_grad) {
    if (shape_numel(shape) != data.size())
        throw InvalidInput("leaf: data size does not match shape");
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->value = std::move(data);
    n->requires_grad = requires_grad;
    return Var(n);
}

Var Var::zeros(Shape shape, bool requires_grad) {
    std::vector<double> data(shape_numel(shape), 0.0);
    return leaf(std::move(shape), std::move(data), requires_grad);
}

Var Var::full(Shape shape, double fill) {
    std::vector<double> data(shape_numel(shape), fill);
    return leaf(std::move(shape), std::move(data), false);
}

Var Var::detach() const {
    auto n = std::make_shared<Node>();
    n->shape = m_node->shape;
    n->value = m_node->value;
    n->requires_grad = false;
    return Var(n);
}

void backward(const Var& loss) {
    Node* root = loss.node().get();
    if (loss.numel() != 1) throw InvalidInput("backward: loss must be a scalar");
    if (!root->requires_grad) return;

    // iterative post-order over the requires-grad subgraph
    std::vector<Node*> order;
    std::unordered_set<Node*> done;
    std::vector<std::pair<Node*, size_t>> stack{{root, 0}};
    std::unordered_set<Node*> on_stack{root};
    while (!stack.empty()) {
        auto& [n, next] = stack.back();
        if (next < n->parents.size()) {
            Node* p = n->parents[next++].get();
            if (p->requires_grad && !done.count(p) && !on_stack.count(p)) {
                stack.push_back({p, 0});
                on_stack.insert(p);
            }
        } else {
            order.push_back(n);
            done.insert(n);
            on_stack.erase(n);
            stack.pop_back();
        }
    }

    root->ensure_grad();
    root->grad[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (!n->backward_fn) continue;
        for (const auto& p : n->parents) p->ensure_grad();
        n->backward_fn(*n);
    }
}

// ---------------------------------------------------------------- elementwise

Var add(const Var& a, const Var& b) {
    check_same_shape(a, b, "add");
    std::vector<double> out(a.numel());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] + b.value()[i];
    return Var(make_node(a.shape(), std::move(out), {a.node(), b.node()}, [](Node& n) {
        for (size_t i = 0; i < n.grad.size(); ++i) {
            if (n.parents[0]->requires_grad) n.parents[0]->grad[i] += n.grad[i];
            if (n.parents[1]->requires_grad) n.parents[1]->grad[i] += n.grad[i];
        }
    }));
}

Var sub(const Var& a, const Var& b) {
    check_same_shape(a, b, "sub");
    std::vector<double> out(a.numel());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] - b.value()[i];
    return Var(make_node(a.shape(), std::move(out), {a.node(), b.node()}, [](Node& n) {
        for (size_t i = 0; i < n.grad.size(); ++i) {
            if (n.parents[0]->requires_grad) n.parents[0]->grad[i] += n.grad[i];
            if (n.parents[1]->requires_grad) n.parents[1]->grad[i] -= n.grad[i];
        }
    }));
}

Var mul(const Var& a, const Var& b) {
    check_same_shape(a, b, "mul");
    std::vector<double> out(a.numel());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] * b.value()[i];
    return Var(make_node(a.shape(), std::move(out), {a.node(), b.node()}, [](Node& n) {
        for (size_t i = 0; i < n.grad.size(); ++i) {
            if (n.parents[0]->requires_grad)
                n.parents[0]->grad[i] += n.grad[i] * n.parents[1]->value[i];
            if (n.parents[1]->requires_grad)
                n.parents[1]->grad[i] += n.grad[i] * n.parents[0]->value[i];
        }
    }));
}

Var div(const Var& a, const Var& b) {
    check_same_shape(a, b, "div");
    std::vector<double> out(a.numel());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] / b.value()[i];
    return Var(make_node(a.shape(), std::move(out), {a.node(), b.node()}, [](Node& n) {
        for (size_t i = 0; i < n.grad.size(); ++i) {
            const double bv = n.parents[1]->value[i];
            if (n.parents[0]->requires_grad) n.parents[0]->grad[i] += n.grad[i] / bv;
            if (n.parents[1]->requires_grad)
                n.parents[1]->grad[i] -= n.grad[i] * n.parents[0]->value[i] / (bv * bv);
        }
    }));
}

Var affine(const Var& a, double scale, double shift) {
    std::vector<double> out(a.numel());
    for (size_t i = 0; i < out.size(); ++i) out[i] = scale * a.value()[i] + shift;
    return Var(make_node(a.shape(), std::move(out), {a.node()}, [scale](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        for (size_t i = 0; i < n.grad.size(); ++i) n.parents[0]->grad[i] += scale * n.grad[i];
    }));
}

Var neg(const Var& a) { return affine(a, -1.0, 0.0); }

Var relu(const Var& a) {
    std::vector<double> out(a.numel());
    for (size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, a.value()[i]);
    return Var(make_node(a.shape(), std::move(out), {a.node()}, [](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        for (size_t i = 0; i < n.grad.size(); ++i)
            if (n.parents[0]->value[i] > 0.0) n.parents[0]->grad[i] += n.grad[i];
    }));
}

Var exp_(const Var& a) {
    std::vector<double> out(a.numel());
    for (size_t i = 0; i < out.size(); ++i) out[i] = std::exp(a.value()[i]);
    return Var(make_node(a.shape(), std::move(out), {a.node()}, [](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        for (size_t i = 0; i < n.grad.size(); ++i) n.parents[0]->grad[i] += n.grad[i] * n.value[i];
    }));
}

Var log_(const Var& a) {
    std::vector<double> out(a.numel());
    for (size_t i = 0; i < out.size(); ++i) out[i] = std::log(a.value()[i]);
    return Var(make_node(a.shape(), std::move(out), {a.node()}, [](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        for (size_t i = 0; i < n.grad.size(); ++i)
            n.parents[0]->grad[i] += n.grad[i] / n.parents[0]->value[i];
    }));
}

Var abs_(const Var& a) {
    std::vector<double> out(a.numel());
    for (size_t i = 0; i < out.size(); ++i) out[i] = std::abs(a.value()[i]);
    return Var(make_node(a.shape(), std::move(out), {a.node()}, [](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        for (size_t i = 0; i < n.grad.size(); ++i) {
            const double v = n.parents[0]->value[i];
            if (v > 0.0) n.parents[0]->grad[i] += n.grad[i];
            else if (v < 0.0) n.parents[0]->grad[i] -= n.grad[i];
        }
    }));
}

Var sqrt_(const Var& a) {
    std::vector<double> out(a.numel());
    for (size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(a.value()[i]);
    return Var(make_node(a.shape(), std::move(out), {a.node()}, [](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        for (size_t i = 0; i < n.grad.size(); ++i)
            n.parents[0]->grad[i] += n.grad[i] * 0.5 / n.value[i];
    }));
}

Var pow_(const Var& a, double p) {
    std::vector<double> out(a.numel());
    for (size_t i = 0; i < out.size(); ++i) out[i] = std::pow(a.value()[i], p);
    return Var(make_node(a.shape(), std::move(out), {a.node()}, [p](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        for (size_t i = 0; i < n.grad.size(); ++i)
            n.parents[0]->grad[i] += n.grad[i] * p * std::pow(n.parents[0]->value[i], p - 1.0);
    }));
}

Var clamp(const Var& a, double lo, double hi) {
    std::vector<double> out(a.numel());
    for (size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(a.value()[i], lo, hi);
    return Var(make_node(a.shape(), std::move(out), {a.node()}, [lo, hi](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        for (size_t i = 0; i < n.grad.size(); ++i) {
            const double v = n.parents[0]->value[i];
            if (v > lo && v < hi) n.parents[0]->grad[i] += n.grad[i];
        }
    }));
}

Var cmul(const Var& a, const std::vector<double>& weights) {
    if (weights.size() != a.numel()) throw InvalidInput("cmul: weight size mismatch");
    std::vector<double> out(a.numel());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] * weights[i];
    return Var(make_node(a.shape(), std::move(out), {a.node()}, [weights](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        for (size_t i = 0; i < n.grad.size(); ++i) n.parents[0]->grad[i] += n.grad[i] * weights[i];
    }));
}

Var cadd(const Var& a, const std::vector<double>& values) {
    if (values.size() != a.numel()) throw InvalidInput("cadd: value size mismatch");
    std::vector<double> out(a.numel());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] + values[i];
    return Var(make_node(a.shape(), std::move(out), {a.node()}, [](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        for (size_t i = 0; i < n.grad.size(); ++i) n.parents[0]->grad[i] += n.grad[i];
    }));
}

// --------------------------------------------------------------------- shape

Var reshape(const Var& a, Shape shape) {
    if (shape_numel(shape) != a.numel()) throw InvalidInput("reshape: element count mismatch");
    std::vector<double> out = a.value();
    return Var(make_node(std::move(shape), std::move(out), {a.node()}, [](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        for (size_t i = 0; i < n.grad.size(); ++i) n.parents[0]->grad[i] += n.grad[i];
    }));
}

Var transpose(const Var& a) {
    if (a.shape().size() != 2) throw InvalidInput("transpose: rank-2 tensor expected");
    const int m = a.dim(0), k = a.dim(1);
    std::vector<double> out(a.numel());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j) out[static_cast<size_t>(j) * m + i] = a.value()[static_cast<size_t>(i) * k + j];
    return Var(make_node({k, m}, std::move(out), {a.node()}, [m, k](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < k; ++j)
                n.parents[0]->grad[static_cast<size_t>(i) * k + j] +=
                    n.grad[static_cast<size_t>(j) * m + i];
    }));
}

Var concat_rows(const std::vector<Var>& parts) {
    if (parts.empty()) throw InvalidInput("concat_rows: no inputs");
    const int cols = parts.front().dim(1);
    int rows = 0;
    for (const auto& p : parts) {
        if (p.shape().size() != 2 || p.dim(1) != cols)
            throw InvalidInput("concat_rows: column counts differ");
        rows += p.dim(0);
    }
    std::vector<double> out;
    out.reserve(static_cast<size_t>(rows) * cols);
    std::vector<std::shared_ptr<Node>> parents;
    for (const auto& p : parts) {
        out.insert(out.end(), p.value().begin(), p.value().end());
        parents.push_back(p.node());
    }
    return Var(make_node({rows, cols}, std::move(out), std::move(parents), [](Node& n) {
        size_t offset = 0;
        for (const auto& p : n.parents) {
            if (p->requires_grad)
                for (size_t i = 0; i < p->value.size(); ++i) p->grad[i] += n.grad[offset + i];
            offset += p->value.size();
        }
    }));
}

Var slice_rows(const Var& a, int r0, int r1) {
    if (a.shape().size() != 2 || r0 < 0 || r1 > a.dim(0) || r0 >= r1)
        throw InvalidInput("slice_rows: bad range");
    const int cols = a.dim(1);
    std::vector<double> out(a.value().begin() + static_cast<size_t>(r0) * cols,
                            a.value().begin() + static_cast<size_t>(r1) * cols);
    return Var(make_node({r1 - r0, cols}, std::move(out), {a.node()}, [r0, cols](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        const size_t base = static_cast<size_t>(r0) * cols;
        for (size_t i = 0; i < n.grad.size(); ++i) n.parents[0]->grad[base + i] += n.grad[i];
    }));
}

Var slice_cols(const Var& a, int c0, int c1) {
    if (a.shape().size() != 2 || c0 < 0 || c1 > a.dim(1) || c0 >= c1)
        throw InvalidInput("slice_cols: bad range");
    const int rows = a.dim(0), cols = a.dim(1), width = c1 - c0;
    std::vector<double> out(static_cast<size_t>(rows) * width);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < width; ++j)
            out[static_cast<size_t>(i) * width + j] = a.value()[static_cast<size_t>(i) * cols + c0 + j];
    return Var(make_node({rows, width}, std::move(out), {a.node()}, [rows, cols, c0, width](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < width; ++j)
                n.parents[0]->grad[static_cast<size_t>(i) * cols + c0 + j] +=
                    n.grad[static_cast<size_t>(i) * width + j];
    }));
}

Var concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw InvalidInput("concat_cols: no inputs");
    const int rows = parts.front().dim(0);
    int cols = 0;
    std::vector<int> widths;
    for (const auto& p : parts) {
        if (p.shape().size() != 2 || p.dim(0) != rows)
            throw InvalidInput("concat_cols: row counts differ");
        widths.push_back(p.dim(1));
        cols += p.dim(1);
    }
    std::vector<double> out(static_cast<size_t>(rows) * cols);
    std::vector<std::shared_ptr<Node>> parents;
    int offset = 0;
    for (size_t k = 0; k < parts.size(); ++k) {
        const auto& p = parts[k];
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < widths[k]; ++j)
                out[static_cast<size_t>(i) * cols + offset + j] =
                    p.value()[static_cast<size_t>(i) * widths[k] + j];
        offset += widths[k];
        parents.push_back(p.node());
    }
    return Var(make_node({rows, cols}, std::move(out), std::move(parents),
                         [rows, cols, widths](Node& n) {
        int off = 0;
        for (size_t k = 0; k < n.parents.size(); ++k) {
            auto& p = n.parents[k];
            if (p->requires_grad)
                for (int i = 0; i < rows; ++i)
                    for (int j = 0; j < widths[k]; ++j)
                        p->grad[static_cast<size_t>(i) * widths[k] + j] +=
                            n.grad[static_cast<size_t>(i) * cols + off + j];
            off += widths[k];
        }
    }));
}

// ------------------------------------------------------ reductions/broadcast

Var sum(const Var& a) {
    double total = 0.0;
    for (const double v : a.value()) total += v;
    return Var(make_node({1}, {total}, {a.node()}, [](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        for (auto& g : n.parents[0]->grad) g += n.grad[0];
    }));
}

Var mean(const Var& a) {
    const double scale = 1.0 / static_cast<double>(a.numel());
    return affine(sum(a), scale, 0.0);
}

Var scale_by(const Var& a, const Var& s) {
    if (s.numel() != 1) throw InvalidInput("scale_by: scale must be scalar");
    std::vector<double> out(a.numel());
    const double sv = s.value()[0];
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] * sv;
    return Var(make_node(a.shape(), std::move(out), {a.node(), s.node()}, [](Node& n) {
        const double sv = n.parents[1]->value[0];
        if (n.parents[0]->requires_grad)
            for (size_t i = 0; i < n.grad.size(); ++i) n.parents[0]->grad[i] += n.grad[i] * sv;
        if (n.parents[1]->requires_grad) {
            double acc = 0.0;
            for (size_t i = 0; i < n.grad.size(); ++i) acc += n.grad[i] * n.parents[0]->value[i];
            n.parents[1]->grad[0] += acc;
        }
    }));
}

Var add_rowvec(const Var& a, const Var& v) {
    if (a.shape().size() != 2 || v.numel() != static_cast<size_t>(a.dim(1)))
        throw InvalidInput("add_rowvec: shape mismatch");
    const int rows = a.dim(0), cols = a.dim(1);
    std::vector<double> out(a.numel());
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            out[static_cast<size_t>(i) * cols + j] =
                a.value()[static_cast<size_t>(i) * cols + j] + v.value()[j];
    return Var(make_node(a.shape(), std::move(out), {a.node(), v.node()}, [rows, cols](Node& n) {
        if (n.parents[0]->requires_grad)
            for (size_t i = 0; i < n.grad.size(); ++i) n.parents[0]->grad[i] += n.grad[i];
        if (n.parents[1]->requires_grad)
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j)
                    n.parents[1]->grad[j] += n.grad[static_cast<size_t>(i) * cols + j];
    }));
}

Var outer(const Var& col, const Var& row) {
    if (col.shape().size() != 1 || row.shape().size() != 1)
        throw InvalidInput("outer: rank-1 inputs expected");
    const int n_rows = col.dim(0), n_cols = row.dim(0);
    std::vector<double> out(static_cast<size_t>(n_rows) * n_cols);
    for (int i = 0; i < n_rows; ++i)
        for (int j = 0; j < n_cols; ++j)
            out[static_cast<size_t>(i) * n_cols + j] = col.value()[i] * row.value()[j];
    return Var(make_node({n_rows, n_cols}, std::move(out), {col.node(), row.node()},
                         [n_rows, n_cols](Node& n) {
        if (n.parents[0]->requires_grad)
            for (int i = 0; i < n_rows; ++i) {
                double acc = 0.0;
                for (int j = 0; j < n_cols; ++j)
                    acc += n.grad[static_cast<size_t>(i) * n_cols + j] * n.parents[1]->value[j];
                n.parents[0]->grad[i] += acc;
            }
        if (n.parents[1]->requires_grad)
            for (int j = 0; j < n_cols; ++j) {
                double acc = 0.0;
                for (int i = 0; i < n_rows; ++i)
                    acc += n.grad[static_cast<size_t>(i) * n_cols + j] * n.parents[0]->value[i];
                n.parents[1]->grad[j] += acc;
            }
    }));
}

Var weighted_row_mean(const Var& a, const std::vector<double>& w) {
    if (a.shape().size() != 2 || w.size() != static_cast<size_t>(a.dim(0)))
        throw InvalidInput("weighted_row_mean: shape mismatch");
    const int rows = a.dim(0), cols = a.dim(1);
    double wsum = 0.0;
    for (const double x : w) wsum += x;
    if (wsum <= 0.0) throw InvalidInput("weighted_row_mean: weights sum to zero");
    std::vector<double> out(cols, 0.0);
    for (int i = 0; i < rows; ++i) {
        if (w[i] == 0.0) continue;
        for (int j = 0; j < cols; ++j) out[j] += w[i] * a.value()[static_cast<size_t>(i) * cols + j];
    }
    for (auto& v : out) v /= wsum;
    return Var(make_node({cols}, std::move(out), {a.node()}, [w, wsum, rows, cols](Node& n) {
        if (!n.parents[0]->requires_grad) return;
        for (int i = 0; i < rows; ++i) {
            if (w[i] == 0.0) continue;
            const double scale = w[i] / wsum;
            for (int j = 0; j < cols; ++j)
                n.parents[0]->grad[static_cast<size_t>(i) * cols + j] += scale * n.grad[j];
        }
    }));
}

bool all_finite(const Var& a) {
    for (const double v : a.value())
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace scribvos::nn
