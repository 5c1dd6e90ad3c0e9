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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "scribvos/nn/tensor.hpp"

namespace scribvos::nn {

namespace {

using detail::make_node;

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

/// Gathers conv patches: rows are output positions, columns (ky,kx,cin).
void im2col(const std::vector<double>& x, int h, int w, int cin, int kh, int kw, int stride,
            int pad, int oh, int ow, std::vector<double>& col) {
    col.assign(static_cast<size_t>(oh) * ow * kh * kw * cin, 0.0);
    const int patch = kh * kw * cin;
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            double* dst = col.data() + (static_cast<size_t>(oy) * ow + ox) * patch;
            for (int ky = 0; ky < kh; ++ky) {
                const int y = oy * stride - pad + ky;
                if (y < 0 || y >= h) {
                    dst += kw * cin;
                    continue;
                }
                for (int kx = 0; kx < kw; ++kx) {
                    const int xx = ox * stride - pad + kx;
                    if (xx >= 0 && xx < w) {
                        const double* src = x.data() + (static_cast<size_t>(y) * w + xx) * cin;
                        std::copy_n(src, cin, dst);
                    }
                    dst += cin;
                }
            }
        }
    }
}

/// Scatter-adds patch gradients back to the input raster.
void col2im(const std::vector<double>& col, int h, int w, int cin, int kh, int kw, int stride,
            int pad, int oh, int ow, std::vector<double>& dx) {
    const int patch = kh * kw * cin;
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            const double* src = col.data() + (static_cast<size_t>(oy) * ow + ox) * patch;
            for (int ky = 0; ky < kh; ++ky) {
                const int y = oy * stride - pad + ky;
                if (y < 0 || y >= h) {
                    src += kw * cin;
                    continue;
                }
                for (int kx = 0; kx < kw; ++kx) {
                    const int xx = ox * stride - pad + kx;
                    if (xx >= 0 && xx < w) {
                        double* dst = dx.data() + (static_cast<size_t>(y) * w + xx) * cin;
                        for (int c = 0; c < cin; ++c) dst[c] += src[c];
                    }
                    src += cin;
                }
            }
        }
    }
}

} // namespace

Var matmul(const Var& a, const Var& b) {
    if (a.shape().size() != 2 || b.shape().size() != 2 || a.dim(1) != b.dim(0))
        throw InvalidInput("matmul: incompatible shapes");
    const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
    std::vector<double> out(static_cast<size_t>(m) * n);
    MutMap(out.data(), m, n).noalias() =
        ConstMap(a.value().data(), m, k) * ConstMap(b.value().data(), k, n);
    return Var(make_node({m, n}, std::move(out), {a.node(), b.node()}, [m, k, n](Node& node) {
        ConstMap dout(node.grad.data(), m, n);
        if (node.parents[0]->requires_grad)
            MutMap(node.parents[0]->grad.data(), m, k).noalias() +=
                dout * ConstMap(node.parents[1]->value.data(), k, n).transpose();
        if (node.parents[1]->requires_grad)
            MutMap(node.parents[1]->grad.data(), k, n).noalias() +=
                ConstMap(node.parents[0]->value.data(), m, k).transpose() * dout;
    }));
}

Var softmax_rows(const Var& a) {
    if (a.shape().size() != 2) throw InvalidInput("softmax_rows: rank-2 tensor expected");
    const int rows = a.dim(0), cols = a.dim(1);
    std::vector<double> out(a.numel());
    for (int i = 0; i < rows; ++i) {
        const double* src = a.value().data() + static_cast<size_t>(i) * cols;
        double* dst = out.data() + static_cast<size_t>(i) * cols;
        double mx = src[0];
        for (int j = 1; j < cols; ++j) mx = std::max(mx, src[j]);
        double total = 0.0;
        for (int j = 0; j < cols; ++j) total += (dst[j] = std::exp(src[j] - mx));
        for (int j = 0; j < cols; ++j) dst[j] /= total;
    }
    return Var(make_node(a.shape(), std::move(out), {a.node()}, [rows, cols](Node& node) {
        if (!node.parents[0]->requires_grad) return;
        for (int i = 0; i < rows; ++i) {
            const double* p = node.value.data() + static_cast<size_t>(i) * cols;
            const double* dy = node.grad.data() + static_cast<size_t>(i) * cols;
            double dot = 0.0;
            for (int j = 0; j < cols; ++j) dot += dy[j] * p[j];
            double* dx = node.parents[0]->grad.data() + static_cast<size_t>(i) * cols;
            for (int j = 0; j < cols; ++j) dx[j] += p[j] * (dy[j] - dot);
        }
    }));
}

Var layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps) {
    if (x.shape().size() != 2) throw InvalidInput("layer_norm: rank-2 tensor expected");
    const int rows = x.dim(0), cols = x.dim(1);
    if (gamma.numel() != static_cast<size_t>(cols) || beta.numel() != static_cast<size_t>(cols))
        throw InvalidInput("layer_norm: gamma/beta size mismatch");
    std::vector<double> out(x.numel());
    std::vector<double> inv_sigma(rows), mu(rows);
    for (int i = 0; i < rows; ++i) {
        const double* src = x.value().data() + static_cast<size_t>(i) * cols;
        double m = 0.0;
        for (int j = 0; j < cols; ++j) m += src[j];
        m /= cols;
        double var = 0.0;
        for (int j = 0; j < cols; ++j) var += (src[j] - m) * (src[j] - m);
        var /= cols;
        mu[i] = m;
        inv_sigma[i] = 1.0 / std::sqrt(var + eps);
        double* dst = out.data() + static_cast<size_t>(i) * cols;
        for (int j = 0; j < cols; ++j)
            dst[j] = (src[j] - m) * inv_sigma[i] * gamma.value()[j] + beta.value()[j];
    }
    return Var(make_node(x.shape(), std::move(out), {x.node(), gamma.node(), beta.node()},
                         [rows, cols, mu, inv_sigma](Node& node) {
        const auto& xval = node.parents[0]->value;
        const auto& gval = node.parents[1]->value;
        for (int i = 0; i < rows; ++i) {
            const double* dy = node.grad.data() + static_cast<size_t>(i) * cols;
            const double* src = xval.data() + static_cast<size_t>(i) * cols;
            const double is = inv_sigma[i], m = mu[i];
            // accumulate the two row sums used by the input gradient
            double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
            for (int j = 0; j < cols; ++j) {
                const double xhat = (src[j] - m) * is;
                const double dxhat = dy[j] * gval[j];
                sum_dxhat += dxhat;
                sum_dxhat_xhat += dxhat * xhat;
                if (node.parents[1]->requires_grad) node.parents[1]->grad[j] += dy[j] * xhat;
                if (node.parents[2]->requires_grad) node.parents[2]->grad[j] += dy[j];
            }
            if (node.parents[0]->requires_grad) {
                double* dx = node.parents[0]->grad.data() + static_cast<size_t>(i) * cols;
                for (int j = 0; j < cols; ++j) {
                    const double xhat = (src[j] - m) * is;
                    const double dxhat = dy[j] * gval[j];
                    dx[j] += is * (dxhat - (sum_dxhat + xhat * sum_dxhat_xhat) / cols);
                }
            }
        }
    }));
}

Var conv2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad) {
    if (x.shape().size() != 3 || weight.shape().size() != 4)
        throw InvalidInput("conv2d: expected [h,w,cin] input and [kh,kw,cin,cout] weight");
    const int h = x.dim(0), w = x.dim(1), cin = x.dim(2);
    const int kh = weight.dim(0), kw = weight.dim(1), cout = weight.dim(3);
    if (weight.dim(2) != cin) throw InvalidInput("conv2d: channel mismatch");
    const int oh = (h + 2 * pad - kh) / stride + 1;
    const int ow = (w + 2 * pad - kw) / stride + 1;
    if (oh <= 0 || ow <= 0) throw InvalidInput("conv2d: empty output");
    const int patch = kh * kw * cin;

    std::vector<double> col;
    im2col(x.value(), h, w, cin, kh, kw, stride, pad, oh, ow, col);
    std::vector<double> out(static_cast<size_t>(oh) * ow * cout);
    MutMap(out.data(), oh * ow, cout).noalias() =
        ConstMap(col.data(), oh * ow, patch) * ConstMap(weight.value().data(), patch, cout);
    if (bias.defined()) {
        if (bias.numel() != static_cast<size_t>(cout)) throw InvalidInput("conv2d: bias size");
        for (int p = 0; p < oh * ow; ++p)
            for (int c = 0; c < cout; ++c) out[static_cast<size_t>(p) * cout + c] += bias.value()[c];
    }

    std::vector<std::shared_ptr<Node>> parents{x.node(), weight.node()};
    if (bias.defined()) parents.push_back(bias.node());
    // the patch matrix is recomputed in the backward pass to keep graphs lean
    return Var(make_node({oh, ow, cout}, std::move(out), std::move(parents),
                         [h, w, cin, kh, kw, stride, pad, oh, ow, cout, patch](Node& node) {
        ConstMap dout(node.grad.data(), oh * ow, cout);
        if (node.parents.size() > 2 && node.parents[2]->requires_grad) {
            for (int p = 0; p < oh * ow; ++p)
                for (int c = 0; c < cout; ++c)
                    node.parents[2]->grad[c] += node.grad[static_cast<size_t>(p) * cout + c];
        }
        std::vector<double> col;
        if (node.parents[0]->requires_grad || node.parents[1]->requires_grad)
            im2col(node.parents[0]->value, h, w, cin, kh, kw, stride, pad, oh, ow, col);
        if (node.parents[1]->requires_grad)
            MutMap(node.parents[1]->grad.data(), patch, cout).noalias() +=
                ConstMap(col.data(), oh * ow, patch).transpose() * dout;
        if (node.parents[0]->requires_grad) {
            std::vector<double> dcol(static_cast<size_t>(oh) * ow * patch);
            MutMap(dcol.data(), oh * ow, patch).noalias() =
                dout * ConstMap(node.parents[1]->value.data(), patch, cout).transpose();
            col2im(dcol, h, w, cin, kh, kw, stride, pad, oh, ow, node.parents[0]->grad);
        }
    }));
}

Var max_pool2d(const Var& x, int kernel, int stride, int pad) {
    if (x.shape().size() != 3) throw InvalidInput("max_pool2d: rank-3 tensor expected");
    const int h = x.dim(0), w = x.dim(1), c = x.dim(2);
    const int oh = (h + 2 * pad - kernel) / stride + 1;
    const int ow = (w + 2 * pad - kernel) / stride + 1;
    std::vector<double> out(static_cast<size_t>(oh) * ow * c,
                            -std::numeric_limits<double>::infinity());
    std::vector<int> argmax(out.size(), -1);
    for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox)
            for (int ky = 0; ky < kernel; ++ky) {
                const int y = oy * stride - pad + ky;
                if (y < 0 || y >= h) continue;
                for (int kx = 0; kx < kernel; ++kx) {
                    const int xx = ox * stride - pad + kx;
                    if (xx < 0 || xx >= w) continue;
                    for (int ch = 0; ch < c; ++ch) {
                        const size_t src = (static_cast<size_t>(y) * w + xx) * c + ch;
                        const size_t dst = (static_cast<size_t>(oy) * ow + ox) * c + ch;
                        if (x.value()[src] > out[dst]) {
                            out[dst] = x.value()[src];
                            argmax[dst] = static_cast<int>(src);
                        }
                    }
                }
            }
    for (size_t i = 0; i < out.size(); ++i)
        if (argmax[i] < 0) out[i] = 0.0; // window fully outside: defined as 0
    return Var(make_node({oh, ow, c}, std::move(out), {x.node()}, [argmax](Node& node) {
        if (!node.parents[0]->requires_grad) return;
        for (size_t i = 0; i < node.grad.size(); ++i)
            if (argmax[i] >= 0) node.parents[0]->grad[argmax[i]] += node.grad[i];
    }));
}

Var upsample_bilinear(const Var& x, int out_h, int out_w) {
    if (x.shape().size() != 3) throw InvalidInput("upsample_bilinear: rank-3 tensor expected");
    const int h = x.dim(0), w = x.dim(1), c = x.dim(2);
    const double sy = static_cast<double>(h) / out_h, sx = static_cast<double>(w) / out_w;

    // precompute the interpolation stencil (align_corners = false)
    struct Stencil { int i0, i1; double a; };
    std::vector<Stencil> ys(out_h), xs(out_w);
    auto fill = [](std::vector<Stencil>& v, int out_n, int in_n, double scale) {
        for (int i = 0; i < out_n; ++i) {
            double src = (i + 0.5) * scale - 0.5;
            src = std::max(0.0, std::min(src, static_cast<double>(in_n - 1)));
            const int i0 = static_cast<int>(src);
            v[i] = {i0, std::min(i0 + 1, in_n - 1), src - i0};
        }
    };
    fill(ys, out_h, h, sy);
    fill(xs, out_w, w, sx);

    std::vector<double> out(static_cast<size_t>(out_h) * out_w * c);
    for (int oy = 0; oy < out_h; ++oy)
        for (int ox = 0; ox < out_w; ++ox) {
            const auto& Y = ys[oy];
            const auto& X = xs[ox];
            const double w00 = (1 - Y.a) * (1 - X.a), w01 = (1 - Y.a) * X.a;
            const double w10 = Y.a * (1 - X.a), w11 = Y.a * X.a;
            const double* p00 = x.value().data() + (static_cast<size_t>(Y.i0) * w + X.i0) * c;
            const double* p01 = x.value().data() + (static_cast<size_t>(Y.i0) * w + X.i1) * c;
            const double* p10 = x.value().data() + (static_cast<size_t>(Y.i1) * w + X.i0) * c;
            const double* p11 = x.value().data() + (static_cast<size_t>(Y.i1) * w + X.i1) * c;
            double* dst = out.data() + (static_cast<size_t>(oy) * out_w + ox) * c;
            for (int ch = 0; ch < c; ++ch)
                dst[ch] = w00 * p00[ch] + w01 * p01[ch] + w10 * p10[ch] + w11 * p11[ch];
        }
    return Var(make_node({out_h, out_w, c}, std::move(out), {x.node()},
                         [ys, xs, out_h, out_w, w, c](Node& node) {
        if (!node.parents[0]->requires_grad) return;
        auto& dx = node.parents[0]->grad;
        for (int oy = 0; oy < out_h; ++oy)
            for (int ox = 0; ox < out_w; ++ox) {
                const auto& Y = ys[oy];
                const auto& X = xs[ox];
                const double w00 = (1 - Y.a) * (1 - X.a), w01 = (1 - Y.a) * X.a;
                const double w10 = Y.a * (1 - X.a), w11 = Y.a * X.a;
                const double* dy = node.grad.data() + (static_cast<size_t>(oy) * out_w + ox) * c;
                double* p00 = dx.data() + (static_cast<size_t>(Y.i0) * w + X.i0) * c;
                double* p01 = dx.data() + (static_cast<size_t>(Y.i0) * w + X.i1) * c;
                double* p10 = dx.data() + (static_cast<size_t>(Y.i1) * w + X.i0) * c;
                double* p11 = dx.data() + (static_cast<size_t>(Y.i1) * w + X.i1) * c;
                for (int ch = 0; ch < c; ++ch) {
                    p00[ch] += w00 * dy[ch];
                    p01[ch] += w01 * dy[ch];
                    p10[ch] += w10 * dy[ch];
                    p11[ch] += w11 * dy[ch];
                }
            }
    }));
}

Var block_mean(const Var& x, int block) {
    const bool has_c = x.shape().size() == 3;
    if (!has_c && x.shape().size() != 2) throw InvalidInput("block_mean: rank-2/3 tensor expected");
    const int h = x.dim(0), w = x.dim(1), c = has_c ? x.dim(2) : 1;
    if (h % block != 0 || w % block != 0)
        throw InvalidInput("block_mean: dimensions not divisible by block");
    const int oh = h / block, ow = w / block;
    const double inv = 1.0 / (static_cast<double>(block) * block);
    std::vector<double> out(static_cast<size_t>(oh) * ow * c, 0.0);
    for (int y = 0; y < h; ++y)
        for (int xx = 0; xx < w; ++xx) {
            const size_t src = (static_cast<size_t>(y) * w + xx) * c;
            const size_t dst = (static_cast<size_t>(y / block) * ow + xx / block) * c;
            for (int ch = 0; ch < c; ++ch) out[dst + ch] += x.value()[src + ch] * inv;
        }
    Shape shape = has_c ? Shape{oh, ow, c} : Shape{oh, ow};
    return Var(make_node(std::move(shape), std::move(out), {x.node()},
                         [h, w, c, block, ow, inv](Node& node) {
        if (!node.parents[0]->requires_grad) return;
        for (int y = 0; y < h; ++y)
            for (int xx = 0; xx < w; ++xx) {
                const size_t dst = (static_cast<size_t>(y) * w + xx) * c;
                const size_t src = (static_cast<size_t>(y / block) * ow + xx / block) * c;
                for (int ch = 0; ch < c; ++ch)
                    node.parents[0]->grad[dst + ch] += node.grad[src + ch] * inv;
            }
    }));
}

} // namespace scribvos::nn
