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

#include "scribvos/losses.hpp"

#include <cmath>

namespace scribvos {

using nn::Var;

ReliableRegionTarget reliable_region_targets(const ScribbleMap& scribble, int ignore_radius) {
    if (ignore_radius < 0) throw InvalidInput("ignore radius must be >= 0");
    const BinaryMask& m = scribble.mask;
    const BinaryMask band = dilate(m, ignore_radius);
    ReliableRegionTarget target;
    target.h = m.h;
    target.w = m.w;
    target.labels.resize(m.values.size());
    for (size_t i = 0; i < m.values.size(); ++i) {
        if (m.values[i]) target.labels[i] = ReliableLabel::positive;
        else if (band.values[i]) target.labels[i] = ReliableLabel::ignore;
        else target.labels[i] = ReliableLabel::negative;
    }
    return target;
}

Var focal_loss_reliable(const std::vector<Var>& q_r_seq,
                        const std::vector<ReliableRegionTarget>& targets, double gamma,
                        double alpha_f) {
    if (q_r_seq.size() != targets.size() || q_r_seq.empty())
        throw InvalidInput("focal loss: sequence lengths differ");
    Var acc;
    std::size_t n_supervised = 0;
    for (size_t t = 0; t < q_r_seq.size(); ++t) {
        const Var& q = q_r_seq[t];
        const auto& target = targets[t];
        if (q.dim(0) != target.h || q.dim(1) != target.w)
            throw InvalidInput("focal loss: map/target shape mismatch");
        std::vector<double> pos_mask(q.numel(), 0.0), neg_mask(q.numel(), 0.0);
        for (size_t i = 0; i < q.numel(); ++i) {
            if (target.labels[i] == ReliableLabel::positive) {
                pos_mask[i] = 1.0;
                ++n_supervised;
            } else if (target.labels[i] == ReliableLabel::negative) {
                neg_mask[i] = 1.0;
                ++n_supervised;
            }
        }
        const Var p = nn::clamp(q, kProbEps, 1.0 - kProbEps);
        const Var one_minus_p = nn::affine(p, -1.0, 1.0);
        // positives: -alpha * (1-p)^gamma * log(p)
        const Var pos_terms = nn::mul(nn::pow_(one_minus_p, gamma), nn::log_(p));
        const Var pos_sum = nn::sum(nn::cmul(pos_terms, pos_mask));
        // negatives: -(1-alpha) * p^gamma * log(1-p)
        const Var neg_terms = nn::mul(nn::pow_(p, gamma), nn::log_(one_minus_p));
        const Var neg_sum = nn::sum(nn::cmul(neg_terms, neg_mask));
        const Var frame_loss =
            nn::add(nn::affine(pos_sum, -alpha_f, 0.0), nn::affine(neg_sum, -(1.0 - alpha_f), 0.0));
        acc = acc.defined() ? nn::add(acc, frame_loss) : frame_loss;
    }
    if (n_supervised == 0) return Var::scalar(0.0);
    return nn::affine(acc, 1.0 / static_cast<double>(n_supervised), 0.0);
}

Var soft_aggregate(const std::vector<Var>& object_maps) {
    if (object_maps.empty()) throw InvalidInput("soft aggregation needs at least one map");
    const int h = object_maps.front().dim(0), w = object_maps.front().dim(1);
    const int m = static_cast<int>(object_maps.size());

    std::vector<Var> odds;   // background first
    Var bg_prob;             // prod of (1 - p_k)
    std::vector<Var> obj_odds;
    for (const auto& q : object_maps) {
        if (q.dim(0) != h || q.dim(1) != w) throw InvalidInput("soft aggregation shape mismatch");
        const Var p = nn::clamp(nn::reshape(q, {1, h * w}), kProbEps, 1.0 - kProbEps);
        const Var one_minus = nn::affine(p, -1.0, 1.0);
        obj_odds.push_back(nn::div(p, one_minus));
        bg_prob = bg_prob.defined() ? nn::mul(bg_prob, one_minus) : one_minus;
    }
    bg_prob = nn::clamp(bg_prob, kProbEps, 1.0 - kProbEps);
    odds.push_back(nn::div(bg_prob, nn::affine(bg_prob, -1.0, 1.0)));
    for (auto& o : obj_odds) odds.push_back(std::move(o));

    Var denom = odds[0];
    for (int k = 1; k <= m; ++k) denom = nn::add(denom, odds[k]);
    std::vector<Var> rows;
    rows.reserve(m + 1);
    for (const auto& o : odds) rows.push_back(nn::div(o, denom));
    return nn::reshape(nn::concat_rows(rows), {m + 1, h, w});
}

Var pce_loss(const std::vector<Var>& aggregated_seq,
             const std::vector<std::vector<LabeledPixel>>& labels_seq) {
    if (aggregated_seq.size() != labels_seq.size() || aggregated_seq.empty())
        throw InvalidInput("pce loss: sequence lengths differ");
    Var acc;
    std::size_t n_labeled = 0;
    for (size_t t = 0; t < aggregated_seq.size(); ++t) {
        const Var& agg = aggregated_seq[t];
        if (agg.shape().size() != 3) throw InvalidInput("pce loss: expected [M+1,H,W] input");
        const int m1 = agg.dim(0), h = agg.dim(1), w = agg.dim(2);
        std::vector<double> select(agg.numel(), 0.0);
        for (const auto& px : labels_seq[t]) {
            if (px.object_id < 0 || px.object_id >= m1)
                throw InvalidInput("labeled pixel identity outside the aggregated distribution");
            if (px.y < 0 || px.y >= h || px.x < 0 || px.x >= w)
                throw InvalidInput("labeled pixel outside the frame");
            // multiset semantics: repeated labels count repeatedly
            select[(static_cast<size_t>(px.object_id) * h + px.y) * w + px.x] += 1.0;
            ++n_labeled;
        }
        const Var logp = nn::log_(nn::clamp(agg, kProbEps, 1.0));
        const Var frame_sum = nn::sum(nn::cmul(logp, select));
        acc = acc.defined() ? nn::add(acc, frame_sum) : frame_sum;
    }
    if (n_labeled == 0) return Var::scalar(0.0);
    return nn::affine(acc, -1.0 / static_cast<double>(n_labeled), 0.0);
}

Var smoothness_loss(const std::vector<Var>& q_e_seq, const std::vector<Image>& frames,
                    double alpha) {
    if (q_e_seq.size() != frames.size() || q_e_seq.empty())
        throw InvalidInput("smoothness loss: sequence lengths differ");
    Var acc;
    std::size_t n_pixels = 0;
    for (size_t t = 0; t < q_e_seq.size(); ++t) {
        const Var& q = q_e_seq[t];
        const Image& img = frames[t];
        const int h = q.dim(0), w = q.dim(1);
        if (img.h != h || img.w != w) throw InvalidInput("smoothness loss: frame shape mismatch");
        n_pixels += static_cast<std::size_t>(h) * w;

        // horizontal differences: [h, w-1]
        if (w > 1) {
            std::vector<double> weight(static_cast<size_t>(h) * (w - 1));
            for (int y = 0; y < h; ++y)
                for (int x = 0; x + 1 < w; ++x) {
                    double di = 0.0;
                    for (int c = 0; c < 3; ++c) di += std::abs(img.at(y, x + 1, c) - img.at(y, x, c));
                    weight[static_cast<size_t>(y) * (w - 1) + x] = std::exp(-alpha * di / 3.0);
                }
            const Var dq = nn::sub(nn::slice_cols(q, 1, w), nn::slice_cols(q, 0, w - 1));
            const Var term = nn::sum(nn::cmul(nn::abs_(dq), weight));
            acc = acc.defined() ? nn::add(acc, term) : term;
        }
        // vertical differences: [h-1, w]
        if (h > 1) {
            std::vector<double> weight(static_cast<size_t>(h - 1) * w);
            for (int y = 0; y + 1 < h; ++y)
                for (int x = 0; x < w; ++x) {
                    double di = 0.0;
                    for (int c = 0; c < 3; ++c) di += std::abs(img.at(y + 1, x, c) - img.at(y, x, c));
                    weight[static_cast<size_t>(y) * w + x] = std::exp(-alpha * di / 3.0);
                }
            const Var dq = nn::sub(nn::slice_rows(q, 1, h), nn::slice_rows(q, 0, h - 1));
            const Var term = nn::sum(nn::cmul(nn::abs_(dq), weight));
            acc = acc.defined() ? nn::add(acc, term) : term;
        }
    }
    if (!acc.defined()) return Var::scalar(0.0);
    return nn::affine(acc, 1.0 / static_cast<double>(n_pixels), 0.0);
}

Var bpc_loss(const std::vector<Var>& forward_maps, const std::vector<Var>& backward_maps) {
    if (forward_maps.size() != backward_maps.size() || forward_maps.empty())
        throw InvalidInput("bpc loss: sequence lengths differ");
    Var acc;
    std::size_t n_pixels = 0;
    for (size_t t = 0; t < forward_maps.size(); ++t) {
        const Var& f = forward_maps[t];
        const Var& b = backward_maps[t];
        if (f.shape() != b.shape()) throw InvalidInput("bpc loss: map shape mismatch");
        n_pixels += f.numel();
        const Var d = nn::sub(f, b);
        const Var term = nn::sum(nn::mul(d, d));
        acc = acc.defined() ? nn::add(acc, term) : term;
    }
    return nn::affine(acc, 1.0 / static_cast<double>(n_pixels), 0.0);
}

TotalLoss total_loss(const Var& fl, const Var& pce, const Var& sn, const Var& bpc, double lambda_fl,
                     double lambda_pce, double lambda_sn, double lambda_bpc) {
    TotalLoss out;
    auto accumulate = [&out](const Var& component, double weight, double& slot) {
        if (!component.defined()) return;
        slot = component.item();
        if (!std::isfinite(slot))
            throw NonFiniteLoss("loss component is not finite: " + std::to_string(slot));
        const Var weighted = nn::affine(component, weight, 0.0);
        out.var = out.var.defined() ? nn::add(out.var, weighted) : weighted;
    };
    accumulate(fl, lambda_fl, out.values.fl);
    accumulate(pce, lambda_pce, out.values.pce);
    accumulate(sn, lambda_sn, out.values.sn);
    accumulate(bpc, lambda_bpc, out.values.bpc);
    if (!out.var.defined()) out.var = Var::scalar(0.0);
    out.values.total = out.var.item();
    if (!std::isfinite(out.values.total)) throw NonFiniteLoss("total loss is not finite");
    return out;
}

} // namespace scribvos
