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

#include "scribvos/datamodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "scribvos/io_image.hpp"

namespace fs = std::filesystem;

namespace scribvos {

namespace {

bool is_frame_file(const fs::path& p) {
    const std::string ext = p.extension().string();
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

/// Maps a numbered file stem ("00003") to its frame index.
std::optional<int> frame_index_of(const fs::path& p) {
    const std::string stem = p.stem().string();
    if (stem.empty() || !std::all_of(stem.begin(), stem.end(), ::isdigit)) return std::nullopt;
    return std::stoi(stem);
}

std::string frame_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%05d", index);
    return buf;
}

std::map<int, LabelMask> load_annotation_dir(const fs::path& dir, int expect_h, int expect_w,
                                             const std::string& what) {
    std::map<int, LabelMask> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".png") continue;
        const auto idx = frame_index_of(entry.path());
        if (!idx) continue;
        LabelMask mask = read_label_png(entry.path().string());
        if (mask.h != expect_h || mask.w != expect_w)
            throw MalformedData(what + " '" + entry.path().string() + "' dimensions " +
                                std::to_string(mask.w) + "x" + std::to_string(mask.h) +
                                " do not match the frames");
        out.emplace(*idx, std::move(mask));
    }
    return out;
}

} // namespace

std::vector<int> VideoSequence::scribble_objects(int frame_index) const {
    std::vector<int> out;
    const auto it = scribbles.find(frame_index);
    if (it == scribbles.end()) return out;
    std::set<int> ids;
    for (const auto v : it->second.labels)
        if (v != 0 && v != 255) ids.insert(v); // 255 is the background stroke
    out.assign(ids.begin(), ids.end());
    return out;
}

ScribbleMap VideoSequence::scribble_for(int frame_index, int object_id) const {
    ScribbleMap out;
    out.object_id = object_id;
    const auto it = scribbles.find(frame_index);
    if (it == scribbles.end()) return out;
    // background scribbles live at palette index 255 (index 0 is "no stroke")
    out.mask = mask_for_label(it->second, object_id == 0 ? 255 : object_id);
    return out;
}

VideoSequence load_sequence(const std::string& root_path, const std::string& sequence_name) {
    const fs::path seq_dir = fs::path(root_path) / sequence_name;
    const fs::path frames_dir = seq_dir / "frames";
    if (!fs::is_directory(frames_dir))
        throw NotFound("sequence directory '" + frames_dir.string() + "' not found");

    std::map<int, fs::path> frame_files;
    for (const auto& entry : fs::directory_iterator(frames_dir)) {
        if (!entry.is_regular_file() || !is_frame_file(entry.path())) continue;
        const auto idx = frame_index_of(entry.path());
        if (!idx) continue;
        frame_files.emplace(*idx, entry.path());
    }
    if (frame_files.empty())
        throw NotFound("no numbered frames in '" + frames_dir.string() + "'");

    VideoSequence seq;
    seq.name = sequence_name;
    for (const auto& [idx, path] : frame_files) {
        Image img = read_image(path.string());
        if (!seq.frames.empty() &&
            (img.h != seq.frames.front().image.h || img.w != seq.frames.front().image.w))
            throw MalformedData("frame '" + path.string() + "' dimensions differ within the sequence");
        seq.frames.emplace_back(std::move(img), idx);
    }

    const int h = seq.frames.front().image.h, w = seq.frames.front().image.w;
    seq.masks = load_annotation_dir(seq_dir / "masks", h, w, "mask");
    seq.scribbles = load_annotation_dir(seq_dir / "scribbles", h, w, "scribble");
    return seq;
}

void save_sequence(const std::string& root_path, const VideoSequence& seq) {
    const fs::path seq_dir = fs::path(root_path) / seq.name;
    fs::create_directories(seq_dir / "frames");
    for (const auto& frame : seq.frames)
        write_image_png((seq_dir / "frames" / (frame_name(frame.index) + ".png")).string(),
                        frame.image);
    if (!seq.masks.empty()) {
        fs::create_directories(seq_dir / "masks");
        for (const auto& [idx, mask] : seq.masks)
            write_label_png((seq_dir / "masks" / (frame_name(idx) + ".png")).string(), mask);
    }
    if (!seq.scribbles.empty()) {
        fs::create_directories(seq_dir / "scribbles");
        for (const auto& [idx, mask] : seq.scribbles)
            write_label_png((seq_dir / "scribbles" / (frame_name(idx) + ".png")).string(), mask);
    }
}

std::vector<std::string> list_sequences(const std::string& root_path) {
    if (!fs::is_directory(root_path))
        throw NotFound("dataset root '" + root_path + "' not found");
    std::vector<std::string> out;
    for (const auto& entry : fs::directory_iterator(root_path))
        if (entry.is_directory() && fs::is_directory(entry.path() / "frames"))
            out.push_back(entry.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

Frame pad_to_stride(const Frame& frame) {
    const int h = frame.image.h, w = frame.image.w;
    if (h < 16 || w < 16) throw InvalidInput("frame smaller than 16x16 cannot be padded");
    const int ph = (h + 15) / 16 * 16;
    const int pw = (w + 15) / 16 * 16;
    if (ph == h && pw == w) return frame;

    Frame out;
    out.index = frame.index;
    out.orig_h = frame.orig_h;
    out.orig_w = frame.orig_w;
    out.image = Image(ph, pw);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                out.image.at(y, x, c) = frame.image.at(y, x, c);
    return out;
}

LabelMask crop_to_original(const LabelMask& mask, int orig_h, int orig_w) {
    if (mask.h == orig_h && mask.w == orig_w) return mask;
    LabelMask out(orig_h, orig_w);
    for (int y = 0; y < orig_h; ++y)
        for (int x = 0; x < orig_w; ++x)
            out.at(y, x) = mask.at(y, x);
    return out;
}

ProbabilityMap crop_to_original(const ProbabilityMap& map, int orig_h, int orig_w) {
    if (map.h == orig_h && map.w == orig_w) return map;
    ProbabilityMap out;
    out.h = orig_h;
    out.w = orig_w;
    out.kind = map.kind;
    out.object_id = map.object_id;
    out.frame_index = map.frame_index;
    out.values.resize(static_cast<size_t>(orig_h) * orig_w);
    for (int y = 0; y < orig_h; ++y)
        for (int x = 0; x < orig_w; ++x)
            out.at(y, x) = map.at(y, x);
    return out;
}

} // namespace scribvos
