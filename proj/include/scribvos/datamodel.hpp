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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scribvos/image.hpp"

namespace scribvos {

/// One video frame. `orig_h`/`orig_w` track the pre-padding extent so
/// predictions can be cropped back after stride alignment.
struct Frame {
    Image image;
    int index = 0;
    int orig_h = 0;
    int orig_w = 0;

    Frame() = default;
    Frame(Image img, int idx)
        : image(std::move(img)), index(idx), orig_h(image.h), orig_w(image.w) {}
};

/// Sparse binary annotation for one object; object_id 0 is the background
/// scribble.
struct ScribbleMap {
    BinaryMask mask;
    int object_id = 0;
};

enum class MapKind { reliable, entire };

/// Dense per-pixel probability in (0,1) for one object on one frame.
struct ProbabilityMap {
    int h = 0;
    int w = 0;
    std::vector<double> values;
    MapKind kind = MapKind::entire;
    int object_id = 1;
    int frame_index = 0;

    double at(int y, int x) const { return values[static_cast<size_t>(y) * w + x]; }
    double& at(int y, int x) { return values[static_cast<size_t>(y) * w + x]; }
};

/// A loaded sequence: frames plus optional per-frame annotation rasters.
/// Scribbles and masks share the indexed-palette convention, so both are
/// stored as LabelMask keyed by frame index.
struct VideoSequence {
    std::string name;
    std::vector<Frame> frames;
    std::map<int, LabelMask> masks;     // evaluation-only ground truth
    std::map<int, LabelMask> scribbles;

    /// Object ids present in the scribble raster of `frame_index`; index 255
    /// (the background stroke) and 0 (no stroke) are excluded.
    std::vector<int> scribble_objects(int frame_index) const;

    /// Binary scribble of one object on one frame; empty mask when absent.
    /// object_id 0 reads the background stroke (palette index 255).
    ScribbleMap scribble_for(int frame_index, int object_id) const;
};

/// An L-frame training sample with per-frame, per-object scribbles and
/// optional ground-truth masks.
struct SequenceSample {
    std::vector<Frame> frames;
    std::vector<std::vector<ScribbleMap>> scribbles; // [frame][object slot]
    std::vector<LabelMask> masks;                    // may be empty

    int length() const { return static_cast<int>(frames.size()); }
};

/// Loads `<root>/<name>` with `frames/`, optional `masks/` and `scribbles/`
/// subdirectories. Frames are sorted by numeric index; annotations are keyed
/// by the same index. Missing annotation directories yield empty maps.
VideoSequence load_sequence(const std::string& root_path, const std::string& sequence_name);

/// Writes the sequence back in the same layout (frames as PNG).
void save_sequence(const std::string& root_path, const VideoSequence& seq);

/// Lists sequence directory names under a dataset root, sorted.
std::vector<std::string> list_sequences(const std::string& root_path);

/// Zero-pads to the smallest H/W multiples of 16; records the original
/// extent. Idempotent.
Frame pad_to_stride(const Frame& frame);

/// Crops an H×W raster back to a frame's pre-padding extent.
LabelMask crop_to_original(const LabelMask& mask, int orig_h, int orig_w);
ProbabilityMap crop_to_original(const ProbabilityMap& map, int orig_h, int orig_w);

} // namespace scribvos
