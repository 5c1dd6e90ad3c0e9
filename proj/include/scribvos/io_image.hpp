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

#include "scribvos/image.hpp"

namespace scribvos {

/// Reads a PNG or JPEG frame as RGB in [0,1]; gray and palette inputs are
/// expanded to RGB. Dispatches on file extension.
Image read_image(const std::string& path);

/// Writes an 8-bit RGB PNG; intensities are rounded to v*255.
void write_image_png(const std::string& path, const Image& img);

/// Reads an annotation PNG as per-pixel object indices. Palette images map
/// directly; 8-bit gray images are accepted when all values are < 64 (raw
/// index convention). Anything else is MalformedData.
LabelMask read_label_png(const std::string& path);

/// Writes an indexed-palette annotation PNG using the shared label palette.
void write_label_png(const std::string& path, const LabelMask& mask);

/// The 256-entry colormap used for every annotation file (the standard
/// bit-reversal colormap shared by the public VOS benchmarks).
const std::array<std::uint8_t, 256 * 3>& label_palette();

} // namespace scribvos
