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

#include "scribvos/model/model.hpp"

namespace scribvos {

using nn::Var;

Model::Model(const Config& cfg, std::uint64_t init_seed) : m_config(cfg) {
    m_config.validate();
    Rng rng(init_seed);
    // construction order fixes the parameter registry order
    m_backbone = make_backbone(cfg.backbone, cfg.feat_channels, m_params, rng);
    m_encoder = std::make_unique<MemoryEncoder>(m_params, cfg.feat_channels, cfg.attn_heads,
                                                cfg.shared_level_embedding, rng);
    m_matcher_r = Matcher(m_params, "matcher_r", cfg.feat_channels, cfg.attn_heads, rng);
    m_matcher_e = Matcher(m_params, "matcher_e", cfg.feat_channels, cfg.attn_heads, rng);
    m_head_r = SegHead(m_params, "head_r", cfg.feat_channels, m_backbone->channels8(),
                       m_backbone->channels4(), rng);
    m_head_e = SegHead(m_params, "head_e", cfg.feat_channels, m_backbone->channels8(),
                       m_backbone->channels4(), rng);
}

FeaturePyramid Model::extract(const Frame& frame) const { return m_backbone->extract(frame); }

MemoryBank Model::init_bank(const FeaturePyramid& f0, const ScribbleMap& scribble,
                            int capacity) const {
    if (scribble.mask.count() == 0) throw EmptyMask("initialization scribble is empty");
    const Var map_d = downsample_scribble_similarity(scribble.mask, f0.F, m_config.patch_size);
    Var entry = m_encoder->encode(map_d, f0.F, Level::scribble);
    return MemoryBank(std::move(entry), /*frame_index=*/0,
                      capacity > 0 ? capacity : m_config.memory_capacity);
}

PredictOutput Model::predict(const MemoryBank& bank, const FeaturePyramid& pyramid) const {
    PredictOutput out;
    if (m_config.single_step) {
        // ablation: segment the entire target directly from the memory
        const Var r_e = m_matcher_e.match(pyramid.F, bank.reference_entire(Var()));
        out.q_e = m_head_e.segment(r_e, pyramid);
        return out;
    }
    const Var r_r = m_matcher_r.match(pyramid.F, bank.reference_reliable());
    out.q_r = m_head_r.segment(r_r, pyramid);
    const Var q_r_d = downsample_probability(out.q_r, m_config.patch_size);
    out.e_r_q = m_encoder->encode(q_r_d, pyramid.F, Level::reliable);
    // the expanding step reads the reliable representation, not the raw feature
    const Var r_e = m_matcher_e.match(r_r, bank.reference_entire(out.e_r_q));
    out.q_e = m_head_e.segment(r_e, pyramid);
    return out;
}

void Model::update_bank(MemoryBank& bank, const PredictOutput& out, const FeaturePyramid& pyramid,
                        int frame_index) const {
    const Var q_e_d = downsample_probability(out.q_e, m_config.patch_size);
    if (m_config.single_step) {
        const Var e_e = m_encoder->encode(q_e_d, pyramid.F, Level::entire);
        bank.update(e_e, e_e, frame_index);
        return;
    }
    // the entire-level entry encodes the target map on top of the already
    // reliability-encoded feature of the same frame
    const Var e_e = m_encoder->encode(q_e_d, out.e_r_q, Level::entire);
    bank.update(out.e_r_q, e_e, frame_index);
}

void Model::save(const std::string& path, std::map<std::string, std::string> metadata) const {
    Checkpoint ckpt;
    ckpt.config_fingerprint = config_fingerprint(m_config);
    for (const auto& [name, var] : m_params.items()) {
        std::vector<std::int32_t> shape(var.shape().begin(), var.shape().end());
        ckpt.put(name, std::move(shape), var.value());
    }
    ckpt.metadata = std::move(metadata);
    ckpt.metadata["config"] = serialize_config(m_config);
    save_checkpoint(path, ckpt);
}

std::pair<std::unique_ptr<Model>, Checkpoint> Model::load(const std::string& path) {
    Checkpoint ckpt = load_checkpoint(path);
    const auto it = ckpt.metadata.find("config");
    if (it == ckpt.metadata.end()) throw MalformedData("checkpoint carries no config");
    const Config cfg = parse_config_text(it->second);
    auto model = std::make_unique<Model>(cfg, /*init_seed=*/cfg.seed);
    model->m_params.load_values(ckpt.tensors);
    return {std::move(model), std::move(ckpt)};
}

} // namespace scribvos
