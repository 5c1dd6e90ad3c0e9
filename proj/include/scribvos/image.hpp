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
#include <vector>

#include "scribvos/common.hpp"

namespace scribvos {

/// RGB raster with intensities in [0,1], row-major, channel-interleaved.
struct Image {
    int h = 0;
    int w = 0;
    std::vector<double> data; // h*w*3

    Image() = default;
    Image(int height, int width, double fill = 0.0)
        : h(height), w(width), data(static_cast<size_t>(height) * width * 3, fill) {}

    double& at(int y, int x, int c) { return data[(static_cast<size_t>(y) * w + x) * 3 + c]; }
    double at(int y, int x, int c) const { return data[(static_cast<size_t>(y) * w + x) * 3 + c]; }
    bool empty() const { return data.empty(); }
};

/// Per-pixel object labels (palette indices); 0 is background.
struct LabelMask {
    int h = 0;
    int w = 0;
    std::vector<std::uint8_t> labels; // h*w

    LabelMask() = default;
    LabelMask(int height, int width, std::uint8_t fill = 0)
        : h(height), w(width), labels(static_cast<size_t>(height) * width, fill) {}

    std::uint8_t& at(int y, int x) { return labels[static_cast<size_t>(y) * w + x]; }
    std::uint8_t at(int y, int x) const { return labels[static_cast<size_t>(y) * w + x]; }
    bool empty() const { return labels.empty(); }
};

/// Binary H×W map with values exactly {0,1}.
struct BinaryMask {
    int h = 0;
    int w = 0;
    std::vector<std::uint8_t> values; // h*w

    BinaryMask() = default;
    BinaryMask(int height, int width, std::uint8_t fill = 0)
        : h(height), w(width), values(static_cast<size_t>(height) * width, fill) {}

    std::uint8_t& at(int y, int x) { return values[static_cast<size_t>(y) * w + x]; }
    std::uint8_t at(int y, int x) const { return values[static_cast<size_t>(y) * w + x]; }
    bool empty() const { return values.empty(); }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto v : values) n += (v != 0);
        return n;
    }
};

/// Extracts the binary mask of one palette index.
inline BinaryMask mask_for_label(const LabelMask& lm, int object_id) {
    BinaryMask out(lm.h, lm.w);
    for (size_t i = 0; i < lm.labels.size(); ++i)
        out.values[i] = (lm.labels[i] == object_id) ? 1 : 0;
    return out;
}

/// Morphological dilation with a (2r+1)^2 square (8-connected) element.
BinaryMask dilate(const BinaryMask& m, int radius);

/// Morphological erosion with a (2r+1)^2 square element; out-of-bounds
/// neighbors count as background.
BinaryMask erode(const BinaryMask& m, int radius);

/// 8-connected component count.
int connected_components(const BinaryMask& m);

} // namespace scribvos
