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

#include "scribvos/scribble.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "scribvos/rng.hpp"

namespace scribvos {

namespace {

// Zhang-Suen thinning subiteration; returns true when a pixel was removed.
bool thin_pass(BinaryMask& m, int step) {
    const int h = m.h, w = m.w;
    auto px = [&](int y, int x) -> int {
        return (y < 0 || y >= h || x < 0 || x >= w) ? 0 : m.at(y, x);
    };
    std::vector<int> to_clear;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!m.at(y, x)) continue;
            const int p2 = px(y - 1, x), p3 = px(y - 1, x + 1), p4 = px(y, x + 1),
                      p5 = px(y + 1, x + 1), p6 = px(y + 1, x), p7 = px(y + 1, x - 1),
                      p8 = px(y, x - 1), p9 = px(y - 1, x - 1);
            const int b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9;
            if (b < 2 || b > 6) continue;
            const int seq[9] = {p2, p3, p4, p5, p6, p7, p8, p9, p2};
            int transitions = 0;
            for (int i = 0; i < 8; ++i) transitions += (seq[i] == 0 && seq[i + 1] == 1);
            if (transitions != 1) continue;
            if (step == 0) {
                if (p2 * p4 * p6 != 0 || p4 * p6 * p8 != 0) continue;
            } else {
                if (p2 * p4 * p8 != 0 || p2 * p6 * p8 != 0) continue;
            }
            to_clear.push_back(y * w + x);
        }
    }
    for (const int idx : to_clear) m.values[idx] = 0;
    return !to_clear.empty();
}

std::vector<int> mask_pixels(const BinaryMask& m) {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(m.values.size()); ++i)
        if (m.values[i]) out.push_back(i);
    return out;
}

int neighbor_count(const BinaryMask& m, int y, int x) {
    int n = 0;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            if (!dy && !dx) continue;
            const int yy = y + dy, xx = x + dx;
            if (yy >= 0 && yy < m.h && xx >= 0 && xx < m.w && m.at(yy, xx)) ++n;
        }
    return n;
}

/// Removes skeleton pixels endpoint-first (random order among current
/// endpoints) until `target` pixels remain. Branch intersections survive
/// longest, so the stroke stays centered on the shape.
BinaryMask peel_to_count(const BinaryMask& skeleton, std::size_t target, Rng& rng) {
    BinaryMask m = skeleton;
    std::size_t count = m.count();
    while (count > target) {
        std::vector<int> endpoints;
        for (const int idx : mask_pixels(m))
            if (neighbor_count(m, idx / m.w, idx % m.w) <= 1) endpoints.push_back(idx);
        if (endpoints.empty()) {
            // closed loop: break it anywhere
            const auto pixels = mask_pixels(m);
            endpoints.push_back(pixels[rng.uniform_int(0, static_cast<int>(pixels.size()) - 1)]);
        }
        const std::size_t removable = std::min<std::size_t>(endpoints.size(), count - target);
        // shuffle (Fisher-Yates) and drop the first `removable`
        for (int i = static_cast<int>(endpoints.size()) - 1; i > 0; --i)
            std::swap(endpoints[i], endpoints[rng.uniform_int(0, i)]);
        for (std::size_t i = 0; i < removable; ++i) m.values[endpoints[i]] = 0;
        count -= removable;
    }
    return m;
}

/// Smooth per-pixel displacement field: coarse random grid, bilinear
/// interpolation, rounded to whole pixels within [-amplitude, amplitude].
struct JitterField {
    int gh, gw, cell;
    std::vector<double> dy, dx;

    JitterField(int h, int w, int amplitude, Rng& rng) : cell(8) {
        gh = h / cell + 2;
        gw = w / cell + 2;
        dy.resize(static_cast<size_t>(gh) * gw);
        dx.resize(static_cast<size_t>(gh) * gw);
        for (size_t i = 0; i < dy.size(); ++i) {
            dy[i] = rng.uniform(-static_cast<double>(amplitude), amplitude);
            dx[i] = rng.uniform(-static_cast<double>(amplitude), amplitude);
        }
    }

    std::pair<int, int> offset(int y, int x) const {
        const double fy = static_cast<double>(y) / cell, fx = static_cast<double>(x) / cell;
        const int y0 = static_cast<int>(fy), x0 = static_cast<int>(fx);
        const double ay = fy - y0, ax = fx - x0;
        auto lerp2 = [&](const std::vector<double>& g) {
            const double top = g[y0 * gw + x0] * (1 - ax) + g[y0 * gw + x0 + 1] * ax;
            const double bot = g[(y0 + 1) * gw + x0] * (1 - ax) + g[(y0 + 1) * gw + x0 + 1] * ax;
            return top * (1 - ay) + bot * ay;
        };
        return {static_cast<int>(std::lround(lerp2(dy))), static_cast<int>(std::lround(lerp2(dx)))};
    }
};

BinaryMask dilate_clipped(const BinaryMask& stroke, int radius, const BinaryMask& clip) {
    BinaryMask out = dilate(stroke, radius);
    for (size_t i = 0; i < out.values.size(); ++i) out.values[i] &= clip.values[i];
    return out;
}

BinaryMask apply_jitter(const BinaryMask& stroke, int amplitude, Rng& rng) {
    if (amplitude <= 0) return stroke;
    const JitterField field(stroke.h, stroke.w, amplitude, rng);
    BinaryMask out(stroke.h, stroke.w);
    for (const int idx : mask_pixels(stroke)) {
        const int y = idx / stroke.w, x = idx % stroke.w;
        const auto [oy, ox] = field.offset(y, x);
        const int yy = std::clamp(y + oy, 0, stroke.h - 1);
        const int xx = std::clamp(x + ox, 0, stroke.w - 1);
        out.at(yy, xx) = 1;
    }
    return out;
}

/// Region pixel closest to the centroid; the degenerate one-pixel skeleton.
BinaryMask centroid_pixel(const BinaryMask& region) {
    double cy = 0.0, cx = 0.0;
    std::size_t n = 0;
    for (const int idx : mask_pixels(region)) {
        cy += idx / region.w;
        cx += idx % region.w;
        ++n;
    }
    cy /= static_cast<double>(n);
    cx /= static_cast<double>(n);
    int best = -1;
    double best_d = 1e18;
    for (const int idx : mask_pixels(region)) {
        const double dy = idx / region.w - cy, dx = idx % region.w - cx;
        const double d = dy * dy + dx * dx;
        if (d < best_d) {
            best_d = d;
            best = idx;
        }
    }
    BinaryMask out(region.h, region.w);
    out.values[best] = 1;
    return out;
}

/// Thin + peel + dilate within the region, shrinking the kept skeleton until
/// the sparsity budget holds.
BinaryMask draw_stroke(const BinaryMask& region, const ScribbleParams& params, Rng& rng,
                       std::size_t budget) {
    BinaryMask skeleton = thin_mask(region);
    // thinning can annihilate small even-thickness blobs
    if (skeleton.count() == 0) skeleton = centroid_pixel(region);
    const std::size_t skeleton_count = skeleton.count();
    const int side = static_cast<int>(std::sqrt(static_cast<double>(region.count())));
    const int width = std::min(params.stroke_width, std::max(1, side / 8));
    const int radius = (width - 1) / 2;

    std::size_t target =
        std::max<std::size_t>(1, static_cast<std::size_t>(
                                     std::lround(params.subsample_fraction * skeleton_count)));
    for (;;) {
        Rng attempt(rng.next_u64());
        BinaryMask stroke = peel_to_count(skeleton, target, attempt);
        stroke = dilate_clipped(stroke, radius, region);
        if (stroke.count() <= budget || target <= 1) {
            return apply_jitter(stroke, params.jitter_px, attempt);
        }
        target = std::max<std::size_t>(1, target * 3 / 4);
    }
}

} // namespace

BinaryMask thin_mask(const BinaryMask& mask) {
    BinaryMask m = mask;
    bool changed = true;
    while (changed) {
        changed = thin_pass(m, 0);
        changed = thin_pass(m, 1) || changed;
    }
    return m;
}

ScribbleMap synthesize_scribble(const BinaryMask& mask, const ScribbleParams& params,
                                int object_id) {
    if (mask.count() == 0) throw EmptyMask("cannot synthesize a scribble from an empty mask");
    Rng rng(params.rng_seed);
    const std::size_t area = mask.count();
    // sparsity budget: scribbles must stay well below the mask area
    const std::size_t budget =
        area >= 100 ? static_cast<std::size_t>(0.15 * static_cast<double>(area))
                    : std::max<std::size_t>(1, area);
    ScribbleMap out;
    out.object_id = object_id;
    out.mask = draw_stroke(mask, params, rng, budget);
    return out;
}

ScribbleMap synthesize_background_scribble(const std::vector<BinaryMask>& object_masks,
                                           const ScribbleParams& params) {
    if (object_masks.empty()) throw InvalidInput("need at least one object mask");
    BinaryMask background(object_masks.front().h, object_masks.front().w, 1);
    for (const auto& m : object_masks) {
        if (m.h != background.h || m.w != background.w)
            throw InvalidInput("object masks disagree on dimensions");
        for (size_t i = 0; i < m.values.size(); ++i)
            if (m.values[i]) background.values[i] = 0;
    }
    if (background.count() == 0)
        throw EmptyMask("object masks cover the full frame; no background left");

    Rng rng(params.rng_seed ^ 0x5173ab91ull);
    // keep the stroke short: the background region is frame-sized
    const std::size_t budget = std::max<std::size_t>(
        8, static_cast<std::size_t>(4.0 * std::sqrt(static_cast<double>(background.count()))));
    ScribbleMap out;
    out.object_id = 0;
    out.mask = draw_stroke(background, params, rng, budget);
    return out;
}

ScribbleReport validate_scribble(const ScribbleMap& scribble, int expect_h, int expect_w) {
    ScribbleReport report;
    report.pixel_count = scribble.mask.count();
    report.empty = (report.pixel_count == 0);
    report.in_bounds = (scribble.mask.h == expect_h && scribble.mask.w == expect_w);
    report.components = connected_components(scribble.mask);
    if (!report.empty) {
        report.min_y = scribble.mask.h;
        report.min_x = scribble.mask.w;
        for (int y = 0; y < scribble.mask.h; ++y)
            for (int x = 0; x < scribble.mask.w; ++x)
                if (scribble.mask.at(y, x)) {
                    report.min_y = std::min(report.min_y, y);
                    report.min_x = std::min(report.min_x, x);
                    report.max_y = std::max(report.max_y, y);
                    report.max_x = std::max(report.max_x, x);
                }
    }
    return report;
}

} // namespace scribvos
