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

#include "scribvos/datamodel.hpp"

namespace scribvos {

struct ScribbleParams {
    int stroke_width = 3;
    double subsample_fraction = 0.8; // kept fraction of the skeleton
    int jitter_px = 1;
    std::uint64_t rng_seed = 0;
};

/// Synthesizes a human-like training scribble from a dense mask: iterative
/// morphological thinning, endpoint peeling down to subsample_fraction,
/// stroke dilation, and a smooth jitter field. With jitter_px = 0 the
/// result is a subset of the mask. Deterministic for a fixed seed.
ScribbleMap synthesize_scribble(const BinaryMask& mask, const ScribbleParams& params,
                                int object_id = 1);

/// Background scribble (object_id 0) drawn strictly outside every object
/// mask (for jitter_px = 0). Throws EmptyMask when no background remains.
ScribbleMap synthesize_background_scribble(const std::vector<BinaryMask>& object_masks,
                                           const ScribbleParams& params);

struct ScribbleReport {
    bool empty = true;
    bool in_bounds = true;
    std::size_t pixel_count = 0;
    int components = 0;
    int min_y = 0, min_x = 0, max_y = -1, max_x = -1;
};

/// Report-only inspection of an initialization scribble.
ScribbleReport validate_scribble(const ScribbleMap& scribble, int expect_h, int expect_w);

/// Morphological skeleton by iterative thinning; exposed for reuse by the
/// background-scribble path and the oracle tests.
BinaryMask thin_mask(const BinaryMask& mask);

} // namespace scribvos
