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

#include "scribvos/synth.hpp"

#include <cmath>
#include <cstdio>

#include "scribvos/rng.hpp"

namespace scribvos {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Catmull-Rom interpolation through the waypoint list at u in [0,1].
std::array<double, 2> spline_at(const std::vector<std::array<double, 2>>& pts, double u) {
    if (pts.size() == 1) return pts[0];
    const int nseg = static_cast<int>(pts.size()) - 1;
    const double s = std::min(std::max(u, 0.0), 1.0) * nseg;
    const int seg = std::min(static_cast<int>(s), nseg - 1);
    const double t = s - seg;
    auto pt = [&](int i) {
        return pts[std::min(std::max(i, 0), static_cast<int>(pts.size()) - 1)];
    };
    const auto p0 = pt(seg - 1), p1 = pt(seg), p2 = pt(seg + 1), p3 = pt(seg + 2);
    std::array<double, 2> out{};
    for (int d = 0; d < 2; ++d) {
        const double a = p1[d];
        const double b = 0.5 * (p2[d] - p0[d]);
        const double c = p0[d] - 2.5 * p1[d] + 2.0 * p2[d] - 0.5 * p3[d];
        const double e = -0.5 * p0[d] + 1.5 * p1[d] - 1.5 * p2[d] + 0.5 * p3[d];
        out[d] = a + b * t + c * t * t + e * t * t * t;
    }
    return out;
}

double scale_at(const ObjectSpec& obj, int t, int clip_length) {
    const double u = clip_length <= 1 ? 0.0 : static_cast<double>(t) / (clip_length - 1);
    return obj.scale_begin + (obj.scale_end - obj.scale_begin) * u;
}

/// Signed containment test in object-local coordinates (u right, v down).
bool covers_local(const ObjectSpec& obj, double u, double v, double scale) {
    const double a = obj.base_size * scale;
    switch (obj.shape) {
    case ShapeKind::disk:
        return u * u + v * v <= a * a;
    case ShapeKind::rectangle:
        return std::abs(u) <= a && std::abs(v) <= 0.62 * a;
    case ShapeKind::lpolygon:
        // union of the vertical and horizontal bars of an L
        return (std::abs(u + 0.5 * a) <= 0.5 * a && std::abs(v) <= a) ||
               (std::abs(u) <= a && std::abs(v + 0.6 * a) <= 0.4 * a);
    }
    return false;
}

struct LocalFrame {
    double cy, cx, cos_a, sin_a, scale;
};

LocalFrame local_frame(const ObjectSpec& obj, int t, int clip_length) {
    const double u = clip_length <= 1 ? 0.0 : static_cast<double>(t) / (clip_length - 1);
    const auto c = spline_at(obj.waypoints, u);
    return {c[0], c[1], std::cos(obj.angle), std::sin(obj.angle), scale_at(obj, t, clip_length)};
}

bool covers(const ObjectSpec& obj, const LocalFrame& lf, double py, double px) {
    const double dy = py - lf.cy, dx = px - lf.cx;
    const double u = lf.cos_a * dx + lf.sin_a * dy;
    const double v = -lf.sin_a * dx + lf.cos_a * dy;
    return covers_local(obj, u, v, lf.scale);
}

double texture_value(const ObjectSpec& obj, double u, double v, int channel) {
    const double phase = 0.9 * channel;
    return obj.color[channel] *
           (1.0 + obj.texture_amp * std::sin(obj.texture_freq * u + phase) *
                      std::sin(obj.texture_freq * v - phase));
}

/// Low-frequency value-noise background (bilinear over a coarse random grid).
struct NoiseBackground {
    int gh, gw, cell;
    std::vector<double> grid; // gh*gw*3

    NoiseBackground(int h, int w, Rng& rng) : cell(std::max(8, std::min(h, w) / 6)) {
        gh = h / cell + 2;
        gw = w / cell + 2;
        grid.resize(static_cast<size_t>(gh) * gw * 3);
        for (auto& v : grid) v = 0.25 + 0.4 * rng.uniform();
    }

    double at(int y, int x, int c) const {
        const double fy = static_cast<double>(y) / cell, fx = static_cast<double>(x) / cell;
        const int y0 = static_cast<int>(fy), x0 = static_cast<int>(fx);
        const double ay = fy - y0, ax = fx - x0;
        auto g = [&](int yy, int xx) { return grid[(static_cast<size_t>(yy) * gw + xx) * 3 + c]; };
        const double top = g(y0, x0) * (1 - ax) + g(y0, x0 + 1) * ax;
        const double bot = g(y0 + 1, x0) * (1 - ax) + g(y0 + 1, x0 + 1) * ax;
        return top * (1 - ay) + bot * ay;
    }
};

double quantize8(double v) {
    return std::lround(std::min(std::max(v, 0.0), 1.0) * 255.0) / 255.0;
}

} // namespace

double analytic_area(const ObjectSpec& obj, int t, int clip_length) {
    const double a = obj.base_size * scale_at(obj, t, clip_length);
    switch (obj.shape) {
    case ShapeKind::disk: return kPi * a * a;
    case ShapeKind::rectangle: return (2 * a) * (2 * 0.62 * a);
    case ShapeKind::lpolygon: {
        const double bar_v = a * 2 * a;        // 1a wide, 2a tall
        const double bar_h = 2 * a * 0.8 * a;  // 2a wide, 0.8a tall
        const double overlap = a * 0.8 * a;    // shared corner
        return bar_v + bar_h - overlap;
    }
    }
    return 0.0;
}

double analytic_perimeter(const ObjectSpec& obj, int t, int clip_length) {
    const double a = obj.base_size * scale_at(obj, t, clip_length);
    switch (obj.shape) {
    case ShapeKind::disk: return 2 * kPi * a;
    case ShapeKind::rectangle: return 2 * (2 * a + 2 * 0.62 * a);
    case ShapeKind::lpolygon: return 2 * (2 * a + 2 * a); // rectilinear hull bound
    }
    return 0.0;
}

RenderedClip render_clip(const SceneSpec& spec) {
    if (spec.objects.empty()) throw InvalidSpec("scene needs at least one object");
    if (spec.h < 16 || spec.w < 16) throw InvalidSpec("canvas smaller than 16x16");
    if (spec.length < 1) throw InvalidSpec("clip length must be >= 1");
    for (const auto& obj : spec.objects)
        if (obj.waypoints.empty()) throw InvalidSpec("object without waypoints");

    Rng rng(spec.seed);
    const NoiseBackground noise(spec.h, spec.w, rng);
    const std::array<double, 3> flat{0.45, 0.45, 0.5};

    RenderedClip clip;
    const int n_obj = static_cast<int>(spec.objects.size());
    std::vector<bool> ever_visible(n_obj, false);

    for (int t = 0; t < spec.length; ++t) {
        std::vector<LocalFrame> lf;
        lf.reserve(n_obj);
        for (const auto& obj : spec.objects) lf.push_back(local_frame(obj, t, spec.length));

        Image img(spec.h, spec.w);
        LabelMask labels(spec.h, spec.w);
        std::vector<BinaryMask> coverage(n_obj, BinaryMask(spec.h, spec.w));

        for (int y = 0; y < spec.h; ++y) {
            for (int x = 0; x < spec.w; ++x) {
                const double py = y + 0.5, px = x + 0.5;
                int top = -1;
                for (int k = 0; k < n_obj; ++k) {
                    if (covers(spec.objects[k], lf[k], py, px)) {
                        coverage[k].at(y, x) = 1;
                        top = k; // later objects win
                    }
                }
                if (top >= 0) {
                    labels.at(y, x) = static_cast<std::uint8_t>(top + 1);
                    const auto& obj = spec.objects[top];
                    const double dy = py - lf[top].cy, dx = px - lf[top].cx;
                    const double u = lf[top].cos_a * dx + lf[top].sin_a * dy;
                    const double v = -lf[top].sin_a * dx + lf[top].cos_a * dy;
                    for (int c = 0; c < 3; ++c) img.at(y, x, c) = quantize8(texture_value(obj, u, v, c));
                } else {
                    for (int c = 0; c < 3; ++c)
                        img.at(y, x, c) =
                            quantize8(spec.plain_background ? flat[c] : noise.at(y, x, c));
                }
            }
        }
        for (int k = 0; k < n_obj; ++k)
            if (coverage[k].count() > 0) ever_visible[k] = true;

        clip.frames.emplace_back(std::move(img), t);
        clip.masks.push_back(std::move(labels));
        clip.coverage.push_back(std::move(coverage));
    }

    for (int k = 0; k < n_obj; ++k)
        if (!ever_visible[k])
            throw InvalidSpec("object " + std::to_string(k) + " never enters the canvas");
    return clip;
}

SceneSpec random_scene(int h, int w, int length, int n_objects, bool with_distractor,
                       std::uint64_t seed) {
    Rng rng(seed);
    SceneSpec spec;
    spec.h = h;
    spec.w = w;
    spec.length = length;
    spec.seed = rng.next_u64();

    const int total = n_objects + (with_distractor ? 1 : 0);
    const double margin = 0.24 * std::min(h, w);
    // lo/hi restrict the vertical band so a clone can shadow its target
    // closely without a full trajectory crossover
    auto random_waypoints = [&](int n, double lo, double hi) {
        std::vector<std::array<double, 2>> pts;
        const double y0 = margin + lo * (h - 2 * margin);
        const double y1 = margin + hi * (h - 2 * margin);
        for (int i = 0; i < n; ++i)
            pts.push_back({rng.uniform(y0, y1), rng.uniform(margin, w - margin)});
        return pts;
    };

    const std::array<std::array<double, 3>, 6> palette{{{0.85, 0.25, 0.2},
                                                        {0.2, 0.65, 0.85},
                                                        {0.9, 0.75, 0.2},
                                                        {0.35, 0.8, 0.35},
                                                        {0.75, 0.35, 0.8},
                                                        {0.95, 0.55, 0.3}}};
    for (int k = 0; k < total; ++k) {
        ObjectSpec obj;
        if (with_distractor && k == total - 1) {
            obj = spec.objects.front(); // clone appearance of the first object
            obj.waypoints = random_waypoints(3, 0.65, 1.0); // target rides the upper band
            obj.scale_begin = obj.scale_end = 1.0;
        } else {
            obj.shape = static_cast<ShapeKind>(rng.uniform_int(0, 2));
            obj.base_size = rng.uniform(0.11, 0.17) * std::min(h, w);
            obj.angle = rng.uniform(0.0, 0.5 * kPi);
            obj.color = palette[k % palette.size()];
            for (auto& c : obj.color) c = std::min(1.0, std::max(0.05, c + rng.uniform(-0.08, 0.08)));
            obj.texture_amp = rng.uniform(0.04, 0.1);
            obj.texture_freq = rng.uniform(0.25, 0.5);
            obj.waypoints = with_distractor && k == 0 ? random_waypoints(3, 0.0, 0.35)
                                                      : random_waypoints(3, 0.0, 1.0);
            obj.scale_begin = rng.uniform(0.9, 1.1);
            obj.scale_end = rng.uniform(0.9, 1.1);
        }
        spec.objects.push_back(std::move(obj));
    }
    return spec;
}

void generate_dataset(const std::string& root, int n_clips, int h, int w, int length,
                      int n_objects, bool with_distractors, std::uint64_t seed) {
    Rng rng(seed);
    for (int i = 0; i < n_clips; ++i) {
        // every other clip swaps one object for a clone of the first, so the
        // object count stays fixed while lookalikes exercise the matcher
        const bool distract = with_distractors && n_objects >= 2 && (i % 2 == 0);
        const SceneSpec spec = random_scene(h, w, length, distract ? n_objects - 1 : n_objects,
                                            distract, rng.next_u64());
        const RenderedClip clip = render_clip(spec);

        VideoSequence seq;
        char name[16];
        std::snprintf(name, sizeof(name), "clip%04d", i);
        seq.name = name;
        seq.frames = clip.frames;
        for (int t = 0; t < static_cast<int>(clip.masks.size()); ++t) seq.masks[t] = clip.masks[t];
        save_sequence(root, seq);
    }
}

} // namespace scribvos
