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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "scribvos/datamodel.hpp"

namespace scribvos {

enum class ShapeKind { disk, rectangle, lpolygon };

/// One animated object: an analytic shape following a Catmull-Rom waypoint
/// spline with a linear scale curve and a texture tied to object-local
/// coordinates (so appearance travels with the object).
struct ObjectSpec {
    ShapeKind shape = ShapeKind::disk;
    double base_size = 16.0;              // radius / half-extent in px
    double angle = 0.0;                   // fixed orientation (rect / L)
    std::array<double, 3> color{0.8, 0.2, 0.2};
    double texture_amp = 0.15;
    double texture_freq = 0.5;
    std::vector<std::array<double, 2>> waypoints; // (y,x) in pixels
    double scale_begin = 1.0;
    double scale_end = 1.0;
};

/// A full clip description. Objects are layered in order: later entries
/// occlude earlier ones.
struct SceneSpec {
    int h = 128;
    int w = 128;
    int length = 10;
    std::uint64_t seed = 0;
    bool plain_background = false;  // flat color instead of low-freq noise
    std::vector<ObjectSpec> objects;
};

struct RenderedClip {
    std::vector<Frame> frames;
    std::vector<LabelMask> masks;          // occlusion-aware labels
    std::vector<std::vector<BinaryMask>> coverage; // [frame][object], pre-occlusion
};

/// Renders the clip analytically (no thresholding); frames are quantized to
/// 8-bit levels so the on-disk round trip is exact. Deterministic per seed.
RenderedClip render_clip(const SceneSpec& spec);

/// Analytic area of one object at frame t (for the rasterization-error
/// property test).
double analytic_area(const ObjectSpec& obj, int t, int clip_length);

/// Perimeter estimate at frame t, the rasterization error bound.
double analytic_perimeter(const ObjectSpec& obj, int t, int clip_length);

/// Draws a randomized scene: `n_objects` moving textured shapes; when
/// `with_distractor`, the last object is a clone of the first (same shape,
/// size, texture) on a different trajectory.
SceneSpec random_scene(int h, int w, int length, int n_objects, bool with_distractor,
                       std::uint64_t seed);

/// Generates `n_clips` sequences under `root` in the standard dataset layout
/// (frames/ + masks/), named clip0000, clip0001, ...
void generate_dataset(const std::string& root, int n_clips, int h, int w, int length,
                      int n_objects, bool with_distractors, std::uint64_t seed);

} // namespace scribvos
