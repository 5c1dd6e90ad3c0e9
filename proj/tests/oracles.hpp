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

// Naive per-pixel reference implementations of every loss, written as plain
// double loops with no shared code against the production path. These are
// the comparison oracles for the unit and acceptance suites.

#include <cmath>
#include <cstddef>
#include <vector>

#include "scribvos/image.hpp"
#include "scribvos/losses.hpp"

namespace oracle {

inline double clamp_prob(double p) {
    const double eps = 1e-7;
    if (p < eps) return eps;
    if (p > 1.0 - eps) return 1.0 - eps;
    return p;
}

/// Focal loss over a clip: -alpha (1-p)^g log p at positives,
/// -(1-alpha) p^g log(1-p) at negatives, averaged over non-ignored pixels.
inline double focal_loss(const std::vector<std::vector<double>>& maps,
                         const std::vector<scribvos::ReliableRegionTarget>& targets, int h, int w,
                         double gamma, double alpha) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < maps.size(); ++t) {
        for (int i = 0; i < h * w; ++i) {
            const auto label = targets[t].labels[i];
            if (label == scribvos::ReliableLabel::ignore) continue;
            const double p = clamp_prob(maps[t][i]);
            if (label == scribvos::ReliableLabel::positive)
                acc += -alpha * std::pow(1.0 - p, gamma) * std::log(p);
            else
                acc += -(1.0 - alpha) * std::pow(p, gamma) * std::log(1.0 - p);
            ++count;
        }
    }
    return count ? acc / static_cast<double>(count) : 0.0;
}

/// Odds-normalized multi-object merge; returns [(m+1) * npx], background
/// first.
inline std::vector<double> soft_aggregate(const std::vector<std::vector<double>>& maps) {
    const std::size_t m = maps.size(), npx = maps[0].size();
    std::vector<double> out((m + 1) * npx, 0.0);
    for (std::size_t px = 0; px < npx; ++px) {
        double bg = 1.0;
        for (std::size_t k = 0; k < m; ++k) bg *= 1.0 - clamp_prob(maps[k][px]);
        bg = clamp_prob(bg);
        std::vector<double> odds(m + 1);
        odds[0] = bg / (1.0 - bg);
        double denom = odds[0];
        for (std::size_t k = 0; k < m; ++k) {
            const double p = clamp_prob(maps[k][px]);
            odds[k + 1] = p / (1.0 - p);
            denom += odds[k + 1];
        }
        for (std::size_t k = 0; k <= m; ++k) out[k * npx + px] = odds[k] / denom;
    }
    return out;
}

/// Partial cross-entropy: aggregates per-frame object maps, then averages
/// -log p(true identity) over the labeled pixels of the whole clip.
inline double pce_loss(const std::vector<std::vector<std::vector<double>>>& per_frame_maps,
                       const std::vector<std::vector<scribvos::LabeledPixel>>& labels, int h,
                       int w) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < per_frame_maps.size(); ++t) {
        const std::vector<double> agg = soft_aggregate(per_frame_maps[t]);
        for (const auto& px : labels[t]) {
            const double p = agg[static_cast<std::size_t>(px.object_id) * h * w + px.y * w + px.x];
            acc += -std::log(clamp_prob(p));
            ++count;
        }
    }
    return count ? acc / static_cast<double>(count) : 0.0;
}

/// Edge-aware forward-difference smoothness with channel-mean |dI| weights.
inline double smoothness_loss(const std::vector<std::vector<double>>& maps,
                              const std::vector<scribvos::Image>& frames, int h, int w,
                              double alpha) {
    double acc = 0.0;
    for (std::size_t t = 0; t < maps.size(); ++t) {
        const auto& q = maps[t];
        const auto& img = frames[t];
        for (int y = 0; y < h; ++y)
            for (int x = 0; x + 1 < w; ++x) {
                double di = 0.0;
                for (int c = 0; c < 3; ++c) di += std::abs(img.at(y, x + 1, c) - img.at(y, x, c));
                acc += std::abs(q[y * w + x + 1] - q[y * w + x]) * std::exp(-alpha * di / 3.0);
            }
        for (int y = 0; y + 1 < h; ++y)
            for (int x = 0; x < w; ++x) {
                double di = 0.0;
                for (int c = 0; c < 3; ++c) di += std::abs(img.at(y + 1, x, c) - img.at(y, x, c));
                acc += std::abs(q[(y + 1) * w + x] - q[y * w + x]) * std::exp(-alpha * di / 3.0);
            }
    }
    return acc / (static_cast<double>(maps.size()) * h * w);
}

/// Mean squared forward/backward disagreement.
inline double bpc_loss(const std::vector<std::vector<double>>& fwd,
                       const std::vector<std::vector<double>>& bwd, int h, int w) {
    double acc = 0.0;
    for (std::size_t t = 0; t < fwd.size(); ++t)
        for (int i = 0; i < h * w; ++i) {
            const double d = fwd[t][i] - bwd[t][i];
            acc += d * d;
        }
    return acc / (static_cast<double>(fwd.size()) * h * w);
}

/// Frame-index bookkeeping model of the memory schedule: FIFO over
/// non-initial pairs, the first stored pair immortal.
struct BankSim {
    std::vector<int> frames;
    int capacity = 4;

    void update(int t) {
        frames.push_back(t);
        if (static_cast<int>(frames.size()) > capacity) frames.erase(frames.begin() + 1);
    }
};

} // namespace oracle
