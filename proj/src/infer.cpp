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

#include "scribvos/infer.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "scribvos/io_image.hpp"
#include "scribvos/losses.hpp"

namespace fs = std::filesystem;

namespace scribvos {

using nn::Var;

namespace {

BinaryMask pad_scribble(const BinaryMask& mask, int ph, int pw) {
    if (mask.h == ph && mask.w == pw) return mask;
    BinaryMask out(ph, pw);
    for (int y = 0; y < mask.h; ++y)
        for (int x = 0; x < mask.w; ++x) out.at(y, x) = mask.at(y, x);
    return out;
}

struct ObjectSession {
    int object_id;
    int first_frame; // sequence position of first appearance
    MemoryBank bank;
};

} // namespace

InferenceResult run_sequence(const Model& model, const VideoSequence& seq,
                             const InferenceOptions& options) {
    if (seq.frames.empty()) throw InvalidInput("empty sequence");
    for (size_t i = 1; i < seq.frames.size(); ++i)
        if (seq.frames[i].index != seq.frames[0].index + static_cast<int>(i))
            throw MalformedData("sequence '" + seq.name + "' has a gap in its frame numbering");

    bool any_scribble = false;
    for (const auto& [idx, raster] : seq.scribbles)
        for (const auto v : raster.labels)
            if (v != 0 && v != 255) any_scribble = true;
    if (!any_scribble)
        throw EmptyMask("sequence '" + seq.name + "' carries no initialization scribble");

    nn::NoGradGuard guard;
    InferenceResult result;
    std::vector<ObjectSession> sessions;

    for (size_t pos = 0; pos < seq.frames.size(); ++pos) {
        const Frame& raw = seq.frames[pos];
        const Frame padded = pad_to_stride(raw);
        const FeaturePyramid pyramid = model.extract(padded);
        ++result.feature_extractions;

        // new objects start their own session at first appearance
        const auto scribble_it = seq.scribbles.find(raw.index);
        if (scribble_it != seq.scribbles.end()) {
            for (const int id : seq.scribble_objects(raw.index)) {
                bool known = false;
                for (const auto& s : sessions) known = known || s.object_id == id;
                if (known) continue;
                ScribbleMap scribble = seq.scribble_for(raw.index, id);
                if (scribble.mask.count() == 0)
                    throw EmptyMask("object " + std::to_string(id) + " has an empty scribble");
                scribble.mask = pad_scribble(scribble.mask, padded.image.h, padded.image.w);
                sessions.push_back({id, static_cast<int>(pos),
                                    model.init_bank(pyramid, scribble, options.memory_capacity)});
            }
        }

        // per-object two-step prediction
        std::vector<Var> q_e_maps;
        std::vector<PredictOutput> outputs;
        for (auto& session : sessions) {
            PredictOutput out = model.predict(session.bank, pyramid);
            q_e_maps.push_back(out.q_e);
            outputs.push_back(std::move(out));
        }

        // merge and emit the label mask
        LabelMask mask(raw.orig_h, raw.orig_w);
        if (!sessions.empty()) {
            const Var agg = soft_aggregate(q_e_maps); // [M+1, H, W]
            const int m1 = agg.dim(0), ph = agg.dim(1), pw = agg.dim(2);
            for (int y = 0; y < raw.orig_h; ++y)
                for (int x = 0; x < raw.orig_w; ++x) {
                    int best = 0;
                    double best_p = agg.value()[static_cast<size_t>(y) * pw + x];
                    for (int k = 1; k < m1; ++k) {
                        const double p =
                            agg.value()[(static_cast<size_t>(k) * ph + y) * pw + x];
                        if (p > best_p) {
                            best_p = p;
                            best = k;
                        }
                    }
                    mask.at(y, x) =
                        best == 0 ? 0 : static_cast<std::uint8_t>(sessions[best - 1].object_id);
                }
        }
        result.masks.emplace(raw.index, std::move(mask));

        if (options.dump_prob_maps) {
            for (size_t k = 0; k < sessions.size(); ++k) {
                ProbabilityMap pm;
                pm.h = padded.image.h;
                pm.w = padded.image.w;
                pm.values = outputs[k].q_e.value();
                pm.kind = MapKind::entire;
                pm.object_id = sessions[k].object_id;
                pm.frame_index = raw.index;
                result.probs[raw.index][sessions[k].object_id] =
                    crop_to_original(pm, raw.orig_h, raw.orig_w);
            }
        }

        // periodic memory maintenance, clocked per object
        std::ostringstream trace;
        for (size_t k = 0; k < sessions.size(); ++k) {
            auto& session = sessions[k];
            const int local_t = static_cast<int>(pos) - session.first_frame;
            if (should_update(local_t, options.update_period))
                model.update_bank(session.bank, outputs[k], pyramid, local_t);
            if (options.keep_bank_trace) {
                if (k) trace << " | ";
                trace << "obj" << session.object_id << " " << session.bank.dump();
            }
        }
        if (options.keep_bank_trace) result.bank_trace.push_back(trace.str());
    }
    return result;
}

void emit_results(const std::map<int, LabelMask>& masks, const std::string& out_root,
                  const std::string& seq_name) {
    const fs::path dir = fs::path(out_root) / seq_name;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IOError("cannot create '" + dir.string() + "': " + ec.message());
    for (const auto& [index, mask] : masks) {
        char name[16];
        std::snprintf(name, sizeof(name), "%05d.png", index);
        write_label_png((dir / name).string(), mask);
    }
}

} // namespace scribvos
