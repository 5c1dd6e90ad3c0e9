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
#include <string>

namespace scribvos {

/// All tunables in one flat struct. Every field maps 1:1 to a key in the
/// key-value config file and to a CLI flag; precedence is flags > file >
/// defaults.
struct Config {
    // model
    std::string backbone = "toy";   // toy | resnet50
    int feat_channels = 256;        // c, width of the stride-16 feature
    int attn_heads = 8;
    int patch_size = 16;            // fixed; validated, not tunable
    bool single_step = false;       // ablation: skip the reliable-region step
    bool shared_level_embedding = false; // ablation: one embedding for all levels

    // losses
    double lambda_fl = 1.0;
    double lambda_pce = 1.0;
    double lambda_sn = 0.3;
    double lambda_bpc = 20.0;
    double focal_gamma = 2.0;
    double focal_alpha = 0.25;
    double smooth_alpha = 10.0;
    int ignore_radius = 6;

    // memory
    int memory_capacity = 4;
    int update_period = 6;

    // scribble synthesis
    int scribble_stroke_width = 3;
    double scribble_subsample = 0.8;
    int scribble_jitter = 1;

    // training
    std::string stage = "video";    // static | video
    int clip_length = 3;
    int batch_size = 4;
    int epochs = 10;
    double lr = 1e-4;
    double weight_decay = 1e-4;
    double grad_stop_prob = 0.5;
    int static_lr_halve_every = 6;  // static stage: halve LR every N epochs
    double poly_power = 0.9;        // video stage: polynomial LR decay
    int crop = 128;

    std::uint64_t seed = 1;

    void validate() const; // throws InvalidInput on out-of-range fields
};

/// Parses a UTF-8 `key = value` file ('#' comments, blank lines ignored).
/// Unknown keys are rejected.
Config load_config(const std::string& path);

/// Same grammar, from an in-memory string (checkpoint metadata).
Config parse_config_text(const std::string& text);

/// Applies one `key=value` assignment (shared by the file parser and the
/// CLI's --set options). Throws InvalidInput for unknown keys or bad values.
void apply_config_entry(Config& cfg, const std::string& key, const std::string& value);

/// Canonical serialization: every key, one per line, sorted.
std::string serialize_config(const Config& cfg);

/// Stable fingerprint of the canonical serialization; stored in checkpoints.
std::uint64_t config_fingerprint(const Config& cfg);

} // namespace scribvos
