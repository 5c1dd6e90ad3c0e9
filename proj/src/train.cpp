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

#include "scribvos/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "scribvos/scribble.hpp"

namespace fs = std::filesystem;

namespace scribvos {

using nn::Var;

namespace {

struct AffineTransform {
    double cos_a, sin_a, scale, ty, tx; // rotation+scale around center, then translation
};

AffineTransform random_affine(int h, int w, Rng& rng) {
    const double angle = rng.uniform(-20.0, 20.0) * 3.14159265358979323846 / 180.0;
    AffineTransform t;
    t.cos_a = std::cos(angle);
    t.sin_a = std::sin(angle);
    t.scale = rng.uniform(0.8, 1.2);
    t.ty = rng.uniform(-0.1, 0.1) * h;
    t.tx = rng.uniform(-0.1, 0.1) * w;
    return t;
}

/// Maps an output pixel back to its source location (inverse warp).
std::pair<double, double> source_of(const AffineTransform& t, int h, int w, int y, int x) {
    const double cy = 0.5 * (h - 1), cx = 0.5 * (w - 1);
    const double dy = (y - t.ty) - cy, dx = (x - t.tx) - cx;
    const double ry = (t.cos_a * dy - t.sin_a * dx) / t.scale;
    const double rx = (t.sin_a * dy + t.cos_a * dx) / t.scale;
    return {ry + cy, rx + cx};
}

Image warp_image(const Image& img, const AffineTransform& t) {
    Image out(img.h, img.w);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x) {
            const auto [sy, sx] = source_of(t, img.h, img.w, y, x);
            if (sy < 0 || sy > img.h - 1 || sx < 0 || sx > img.w - 1) continue;
            const int y0 = static_cast<int>(sy), x0 = static_cast<int>(sx);
            const int y1 = std::min(y0 + 1, img.h - 1), x1 = std::min(x0 + 1, img.w - 1);
            const double ay = sy - y0, ax = sx - x0;
            for (int c = 0; c < 3; ++c) {
                const double top = img.at(y0, x0, c) * (1 - ax) + img.at(y0, x1, c) * ax;
                const double bot = img.at(y1, x0, c) * (1 - ax) + img.at(y1, x1, c) * ax;
                out.at(y, x, c) = top * (1 - ay) + bot * ay;
            }
        }
    return out;
}

LabelMask warp_mask(const LabelMask& mask, const AffineTransform& t) {
    LabelMask out(mask.h, mask.w);
    for (int y = 0; y < mask.h; ++y)
        for (int x = 0; x < mask.w; ++x) {
            const auto [sy, sx] = source_of(t, mask.h, mask.w, y, x);
            const int ny = static_cast<int>(std::lround(sy)), nx = static_cast<int>(std::lround(sx));
            if (ny < 0 || ny >= mask.h || nx < 0 || nx >= mask.w) continue;
            out.at(y, x) = mask.at(ny, nx);
        }
    return out;
}

Image color_jitter(const Image& img, Rng& rng) {
    double gain[3], offset[3];
    for (int c = 0; c < 3; ++c) {
        gain[c] = rng.uniform(0.9, 1.1);
        offset[c] = rng.uniform(-0.05, 0.05);
    }
    Image out = img;
    for (size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = std::clamp(out.data[i] * gain[i % 3] + offset[i % 3], 0.0, 1.0);
    return out;
}

std::vector<int> foreground_ids(const LabelMask& mask) {
    std::set<int> ids;
    for (const auto v : mask.labels)
        if (v != 0 && v != 255) ids.insert(v);
    return {ids.begin(), ids.end()};
}

ScribbleParams scribble_params_from(const Config& cfg, std::uint64_t seed) {
    ScribbleParams p;
    p.stroke_width = cfg.scribble_stroke_width;
    p.subsample_fraction = cfg.scribble_subsample;
    p.jitter_px = cfg.scribble_jitter;
    p.rng_seed = seed;
    return p;
}

/// Object + background scribbles for one annotated frame.
std::vector<ScribbleMap> synthesize_frame_scribbles(const LabelMask& mask, const Config& cfg,
                                                    Rng& rng) {
    std::vector<ScribbleMap> out;
    std::vector<BinaryMask> object_masks;
    for (const int id : foreground_ids(mask)) {
        BinaryMask m = mask_for_label(mask, id);
        out.push_back(synthesize_scribble(m, scribble_params_from(cfg, rng.next_u64()), id));
        object_masks.push_back(std::move(m));
    }
    if (!object_masks.empty()) {
        try {
            out.push_back(
                synthesize_background_scribble(object_masks, scribble_params_from(cfg, rng.next_u64())));
        } catch (const EmptyMask&) {
            // frame fully covered by objects: no background stroke
        }
    }
    return out;
}

} // namespace

SequenceSample make_stage1_sample(const Image& image, const LabelMask& mask, const Config& cfg,
                                  Rng& rng) {
    const std::vector<int> ids = foreground_ids(mask);
    if (ids.empty()) throw EmptyMask("stage-1 source mask has no foreground object");

    SequenceSample sample;
    for (int t = 0; t < cfg.clip_length; ++t) {
        LabelMask warped;
        Image frame_img;
        bool ok = false;
        for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
            const AffineTransform transform = random_affine(image.h, image.w, rng);
            warped = warp_mask(mask, transform);
            ok = true;
            for (const int id : ids)
                if (mask_for_label(warped, id).count() == 0) ok = false;
            if (ok) frame_img = color_jitter(warp_image(image, transform), rng);
        }
        if (!ok) throw EmptyMask("augmentation emptied an object mask repeatedly; sample skipped");
        sample.frames.emplace_back(std::move(frame_img), t);
        sample.scribbles.push_back(synthesize_frame_scribbles(warped, cfg, rng));
        sample.masks.push_back(std::move(warped));
    }
    return sample;
}

SequenceSample make_video_sample(const VideoSequence& seq, int start, int length, int stride) {
    if (stride < 1) throw InvalidInput("window stride must be >= 1");
    if (start < 0 || start + (length - 1) * stride >= static_cast<int>(seq.frames.size()))
        throw InvalidInput("sample window outside the sequence");
    SequenceSample sample;
    for (int t = 0; t < length; ++t) {
        const Frame& src = seq.frames[start + t * stride];
        sample.frames.emplace_back(src.image, t);
        const auto it = seq.scribbles.find(src.index);
        if (it == seq.scribbles.end())
            throw InvalidInput("sequence '" + seq.name + "' is missing scribbles for frame " +
                               std::to_string(src.index) + " (run synth-scribbles first)");
        std::vector<ScribbleMap> frame_scribbles;
        for (const int id : foreground_ids(it->second)) {
            ScribbleMap s;
            s.object_id = id;
            s.mask = mask_for_label(it->second, id);
            frame_scribbles.push_back(std::move(s));
        }
        BinaryMask bg = mask_for_label(it->second, 255); // background stroke convention
        if (bg.count() > 0) frame_scribbles.push_back(ScribbleMap{std::move(bg), 0});
        sample.scribbles.push_back(std::move(frame_scribbles));
        const auto mask_it = seq.masks.find(src.index);
        if (mask_it != seq.masks.end()) sample.masks.push_back(mask_it->second);
    }
    return sample;
}

namespace {

const ScribbleMap* find_scribble(const std::vector<ScribbleMap>& scribbles, int object_id) {
    for (const auto& s : scribbles)
        if (s.object_id == object_id) return &s;
    return nullptr;
}

/// Cuts one shared crop window out of every frame of a sample; objects whose
/// scribbles fall fully outside are dropped for the clip.
SequenceSample crop_sample(const SequenceSample& sample, int crop, Rng& rng) {
    const int h = sample.frames.front().image.h, w = sample.frames.front().image.w;
    if (h <= crop && w <= crop) return sample;
    const int ch = std::min(crop, h), cw = std::min(crop, w);
    const int oy = rng.uniform_int(0, h - ch), ox = rng.uniform_int(0, w - cw);

    SequenceSample out;
    for (int t = 0; t < sample.length(); ++t) {
        Image img(ch, cw);
        for (int y = 0; y < ch; ++y)
            for (int x = 0; x < cw; ++x)
                for (int c = 0; c < 3; ++c)
                    img.at(y, x, c) = sample.frames[t].image.at(oy + y, ox + x, c);
        out.frames.emplace_back(std::move(img), t);

        std::vector<ScribbleMap> scribbles;
        for (const auto& s : sample.scribbles[t]) {
            ScribbleMap cropped;
            cropped.object_id = s.object_id;
            cropped.mask = BinaryMask(ch, cw);
            for (int y = 0; y < ch; ++y)
                for (int x = 0; x < cw; ++x) cropped.mask.at(y, x) = s.mask.at(oy + y, ox + x);
            if (cropped.mask.count() > 0) scribbles.push_back(std::move(cropped));
        }
        out.scribbles.push_back(std::move(scribbles));
        if (!sample.masks.empty()) {
            LabelMask mask(ch, cw);
            for (int y = 0; y < ch; ++y)
                for (int x = 0; x < cw; ++x) mask.at(y, x) = sample.masks[t].at(oy + y, ox + x);
            out.masks.push_back(std::move(mask));
        }
    }
    return out;
}

bool has_init_scribble(const SequenceSample& sample) {
    auto any_fg = [](const std::vector<ScribbleMap>& frame) {
        for (const auto& s : frame)
            if (s.object_id > 0 && s.mask.count() > 0) return true;
        return false;
    };
    return any_fg(sample.scribbles.front()) && any_fg(sample.scribbles.back());
}

} // namespace

ClipPrediction forward_clip(const Model& model, const SequenceSample& sample, Direction direction) {
    const int length = sample.length();
    if (length < 1) throw InvalidInput("empty sample");
    const int init_frame = direction == Direction::forward ? 0 : length - 1;

    std::set<int> id_set;
    for (const auto& s : sample.scribbles[init_frame])
        if (s.object_id > 0) id_set.insert(s.object_id);
    if (id_set.empty())
        throw InvalidInput("no initialization scribble on the clip's first frame");

    ClipPrediction pred;
    pred.object_ids.assign(id_set.begin(), id_set.end());
    const int n_obj = static_cast<int>(pred.object_ids.size());
    pred.q_r.assign(n_obj, std::vector<Var>(length));
    pred.q_e.assign(n_obj, std::vector<Var>(length));

    std::vector<MemoryBank> banks;
    banks.reserve(n_obj);

    for (int step = 0; step < length; ++step) {
        const int t = direction == Direction::forward ? step : length - 1 - step;
        const Frame padded = pad_to_stride(sample.frames[t]);
        const FeaturePyramid pyramid = model.extract(padded);
        if (step == 0) {
            for (const int id : pred.object_ids) {
                const ScribbleMap* s = find_scribble(sample.scribbles[t], id);
                if (!s || s->mask.count() == 0)
                    throw InvalidInput("missing initialization scribble for object " +
                                       std::to_string(id));
                // dynamic memory: room for every frame of the clip
                banks.push_back(model.init_bank(pyramid, *s, length));
            }
        }
        for (int k = 0; k < n_obj; ++k) {
            PredictOutput out = model.predict(banks[k], pyramid);
            // dynamic memory: every processed frame is remembered
            model.update_bank(banks[k], out, pyramid, step);
            pred.q_r[k][t] = std::move(out.q_r);
            pred.q_e[k][t] = std::move(out.q_e);
        }
    }
    pred.final_banks = std::move(banks);
    return pred;
}

namespace {

/// All scribble-supervised losses of one direction's predictions.
struct DirectionLosses {
    Var fl, pce, sn;
};

DirectionLosses direction_losses(const ClipPrediction& pred, const SequenceSample& sample,
                                 const Config& cfg) {
    const int length = sample.length();
    const int n_obj = static_cast<int>(pred.object_ids.size());

    DirectionLosses out;
    // focal loss on the reliable-region maps, averaged over objects; the
    // single-step variant produces no reliable maps at all, and a zeroed
    // weight skips the term's graph outright
    const bool has_reliable = !pred.q_r.empty() && pred.q_r[0][0].defined();
    if (has_reliable && cfg.lambda_fl > 0.0) {
        Var fl_acc;
        for (int k = 0; k < n_obj; ++k) {
            std::vector<ReliableRegionTarget> targets;
            for (int t = 0; t < length; ++t) {
                const ScribbleMap* s = find_scribble(sample.scribbles[t], pred.object_ids[k]);
                ScribbleMap empty;
                if (!s) {
                    empty.mask = BinaryMask(sample.frames[t].image.h, sample.frames[t].image.w);
                    s = &empty;
                }
                targets.push_back(reliable_region_targets(*s, cfg.ignore_radius));
            }
            const Var fl = focal_loss_reliable(pred.q_r[k], targets, cfg.focal_gamma, cfg.focal_alpha);
            fl_acc = fl_acc.defined() ? nn::add(fl_acc, fl) : fl;
        }
        out.fl = nn::affine(fl_acc, 1.0 / n_obj, 0.0);
    }

    // partial cross-entropy on the aggregated multi-object distribution
    std::vector<Var> aggregated;
    std::vector<std::vector<LabeledPixel>> labels;
    for (int t = 0; t < length; ++t) {
        std::vector<Var> per_object;
        for (int k = 0; k < n_obj; ++k) per_object.push_back(pred.q_e[k][t]);
        aggregated.push_back(soft_aggregate(per_object));
        std::vector<LabeledPixel> frame_labels;
        for (const auto& s : sample.scribbles[t]) {
            int row = 0;
            if (s.object_id > 0) {
                const auto it =
                    std::find(pred.object_ids.begin(), pred.object_ids.end(), s.object_id);
                if (it == pred.object_ids.end()) continue; // object absent at init: unsupervised
                row = static_cast<int>(it - pred.object_ids.begin()) + 1;
            }
            for (int y = 0; y < s.mask.h; ++y)
                for (int x = 0; x < s.mask.w; ++x)
                    if (s.mask.at(y, x)) frame_labels.push_back({y, x, row});
        }
        labels.push_back(std::move(frame_labels));
    }
    out.pce = pce_loss(aggregated, labels);

    // smoothness on each object's entire-target maps
    if (cfg.lambda_sn > 0.0) {
        std::vector<Image> frame_images;
        for (const auto& f : sample.frames) frame_images.push_back(f.image);
        Var sn_acc;
        for (int k = 0; k < n_obj; ++k) {
            const Var sn = smoothness_loss(pred.q_e[k], frame_images, cfg.smooth_alpha);
            sn_acc = sn_acc.defined() ? nn::add(sn_acc, sn) : sn;
        }
        out.sn = nn::affine(sn_acc, 1.0 / n_obj, 0.0);
    }
    return out;
}

Var clip_bpc(const ClipPrediction& live, const ClipPrediction& stopped) {
    // the two directions initialize from opposite end frames, so their
    // object sets can differ (an end-frame occlusion hides a scribble);
    // consistency applies to objects both directions predicted
    Var acc;
    int matched = 0;
    for (size_t k = 0; k < live.object_ids.size(); ++k) {
        const auto it = std::find(stopped.object_ids.begin(), stopped.object_ids.end(),
                                  live.object_ids[k]);
        if (it == stopped.object_ids.end()) continue;
        const size_t j = static_cast<size_t>(it - stopped.object_ids.begin());
        const Var term = bpc_loss(live.q_e[k], stopped.q_e[j]);
        acc = acc.defined() ? nn::add(acc, term) : term;
        ++matched;
    }
    if (!matched) return Var(); // disjoint object sets: no consistency term
    return nn::affine(acc, 1.0 / matched, 0.0);
}

} // namespace

LossBreakdown train_step(Model& model, const std::vector<SequenceSample>& batch,
                         nn::AdamW& optimizer, const Config& cfg, Rng& rng) {
    if (batch.empty()) throw InvalidInput("empty batch");
    optimizer.zero_grad();
    LossBreakdown mean{};
    const double inv_batch = 1.0 / static_cast<double>(batch.size());

    for (const auto& sample : batch) {
        TotalLoss loss;
        if (cfg.stage == "video" && cfg.lambda_bpc > 0.0) {
            // stop one direction's gradients; the stopped pass runs grad-free
            const bool stop_backward = rng.bernoulli(cfg.grad_stop_prob);
            ClipPrediction live, stopped;
            if (stop_backward) {
                live = forward_clip(model, sample, Direction::forward);
                {
                    nn::NoGradGuard guard;
                    stopped = forward_clip(model, sample, Direction::backward);
                }
            } else {
                {
                    nn::NoGradGuard guard;
                    stopped = forward_clip(model, sample, Direction::forward);
                }
                live = forward_clip(model, sample, Direction::backward);
            }
            const DirectionLosses dl = direction_losses(live, sample, cfg);
            const Var bpc = clip_bpc(live, stopped);
            loss = total_loss(dl.fl, dl.pce, dl.sn, bpc, cfg.lambda_fl, cfg.lambda_pce,
                              cfg.lambda_sn, cfg.lambda_bpc);
        } else {
            const ClipPrediction pred = forward_clip(model, sample, Direction::forward);
            const DirectionLosses dl = direction_losses(pred, sample, cfg);
            loss = total_loss(dl.fl, dl.pce, dl.sn, Var(), cfg.lambda_fl, cfg.lambda_pce,
                              cfg.lambda_sn, cfg.lambda_bpc);
        }
        nn::backward(nn::affine(loss.var, inv_batch, 0.0));
        mean.fl += loss.values.fl * inv_batch;
        mean.pce += loss.values.pce * inv_batch;
        mean.sn += loss.values.sn * inv_batch;
        mean.bpc += loss.values.bpc * inv_batch;
        mean.total += loss.values.total * inv_batch;
    }
    optimizer.step();
    return mean;
}

TrainResult run_training(const Config& cfg, const std::string& dataset_root,
                         const std::string& out_dir,
                         const std::optional<std::string>& resume_path, int windows_per_clip,
                         const std::function<void(std::int64_t, const LossBreakdown&)>& on_step) {
    cfg.validate();
    const auto names = list_sequences(dataset_root);
    if (names.empty()) throw InvalidInput("dataset '" + dataset_root + "' has no sequences");
    std::vector<VideoSequence> sequences;
    for (const auto& name : names) sequences.push_back(load_sequence(dataset_root, name));

    std::unique_ptr<Model> model;
    std::int64_t step = 0;
    int start_epoch = 0;
    std::unique_ptr<nn::AdamW> optimizer;
    if (resume_path) {
        auto [loaded, ckpt] = Model::load(*resume_path);
        model = std::move(loaded);
        optimizer = std::make_unique<nn::AdamW>(model->params().all(), cfg.lr, cfg.weight_decay);
        step = std::stoll(ckpt.metadata.at("step"));
        start_epoch = std::stoi(ckpt.metadata.at("epoch"));
        std::vector<std::vector<double>> m, v;
        for (size_t i = 0; i < model->params().items().size(); ++i) {
            char key[32];
            std::snprintf(key, sizeof(key), "adamw.m.%04zu", i);
            m.push_back(ckpt.tensor(key));
            std::snprintf(key, sizeof(key), "adamw.v.%04zu", i);
            v.push_back(ckpt.tensor(key));
        }
        optimizer->restore(step, std::move(m), std::move(v));
    } else {
        model = std::make_unique<Model>(cfg, cfg.seed);
        optimizer = std::make_unique<nn::AdamW>(model->params().all(), cfg.lr, cfg.weight_decay);
    }

    fs::create_directories(out_dir);
    std::ofstream log(fs::path(out_dir) / "loss_log.tsv",
                      resume_path ? std::ios::app : std::ios::out);
    if (!log) throw IOError("cannot write the loss log in '" + out_dir + "'");
    if (!resume_path) log << "step\tstage\tfl\tpce\tsn\tbpc\ttotal\tlr\n";

    // samples per epoch: video stage draws windows, static stage augments
    // each sequence's first annotated frame
    std::int64_t samples_per_epoch = 0;
    if (cfg.stage == "video")
        samples_per_epoch = static_cast<std::int64_t>(sequences.size()) * windows_per_clip;
    else
        samples_per_epoch = static_cast<std::int64_t>(sequences.size());
    const std::int64_t steps_per_epoch =
        std::max<std::int64_t>(1, samples_per_epoch / cfg.batch_size);
    const std::int64_t total_steps = steps_per_epoch * cfg.epochs;

    const std::string ckpt_path = (fs::path(out_dir) / "model.ckpt").string();
    auto write_checkpoint = [&](int epochs_done) {
        Checkpoint ckpt;
        ckpt.config_fingerprint = config_fingerprint(model->config());
        for (const auto& [name, var] : model->params().items()) {
            std::vector<std::int32_t> shape(var.shape().begin(), var.shape().end());
            ckpt.put(name, std::move(shape), var.value());
        }
        const auto& mstate = optimizer->m_state();
        const auto& vstate = optimizer->v_state();
        for (size_t i = 0; i < mstate.size(); ++i) {
            char key[32];
            std::snprintf(key, sizeof(key), "adamw.m.%04zu", i);
            ckpt.put(key, {static_cast<std::int32_t>(mstate[i].size())}, mstate[i]);
            std::snprintf(key, sizeof(key), "adamw.v.%04zu", i);
            ckpt.put(key, {static_cast<std::int32_t>(vstate[i].size())}, vstate[i]);
        }
        ckpt.metadata["step"] = std::to_string(step);
        ckpt.metadata["epoch"] = std::to_string(epochs_done);
        ckpt.metadata["stage"] = cfg.stage;
        ckpt.metadata["config"] = serialize_config(model->config());
        save_checkpoint(ckpt_path, ckpt);
    };

    TrainResult result;
    result.first_loss = -1.0;
    Rng root_rng(cfg.seed);

    for (int epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
        Rng epoch_rng(root_rng.fork(0x70c4 + epoch));
        // gather the epoch's samples
        std::vector<SequenceSample> samples;
        for (size_t si = 0; si < sequences.size(); ++si) {
            const auto& seq = sequences[si];
            if (cfg.stage == "video") {
                const int t_count = static_cast<int>(seq.frames.size());
                if (t_count < cfg.clip_length)
                    throw InvalidInput("sequence '" + seq.name + "' shorter than the clip length");
                for (int wdx = 0; wdx < windows_per_clip; ++wdx) {
                    const int max_stride =
                        std::max(1, std::min(3, (t_count - 1) / std::max(1, cfg.clip_length - 1)));
                    const int stride = epoch_rng.uniform_int(1, max_stride);
                    const int start =
                        epoch_rng.uniform_int(0, t_count - 1 - (cfg.clip_length - 1) * stride);
                    SequenceSample sample = make_video_sample(seq, start, cfg.clip_length, stride);
                    // both directions need an initialization scribble after cropping
                    for (int attempt = 0; attempt < 10; ++attempt) {
                        SequenceSample cropped = crop_sample(sample, cfg.crop, epoch_rng);
                        if (has_init_scribble(cropped)) {
                            samples.push_back(std::move(cropped));
                            break;
                        }
                    }
                }
            } else {
                const auto it = seq.masks.find(seq.frames.front().index);
                if (it == seq.masks.end())
                    throw InvalidInput("sequence '" + seq.name + "' has no mask for stage-1 training");
                // crop oversized sources before augmenting
                Image image = seq.frames.front().image;
                LabelMask mask = it->second;
                for (int attempt = 0; attempt < 10; ++attempt) {
                    if (image.h <= cfg.crop && image.w <= cfg.crop) break;
                    const int ch = std::min(cfg.crop, image.h), cw = std::min(cfg.crop, image.w);
                    const int oy = epoch_rng.uniform_int(0, image.h - ch);
                    const int ox = epoch_rng.uniform_int(0, image.w - cw);
                    Image ci(ch, cw);
                    LabelMask cm(ch, cw);
                    bool any_fg = false;
                    for (int y = 0; y < ch; ++y)
                        for (int x = 0; x < cw; ++x) {
                            for (int c = 0; c < 3; ++c) ci.at(y, x, c) = image.at(oy + y, ox + x, c);
                            cm.at(y, x) = mask.at(oy + y, ox + x);
                            any_fg = any_fg || (cm.at(y, x) != 0 && cm.at(y, x) != 255);
                        }
                    if (any_fg) {
                        image = std::move(ci);
                        mask = std::move(cm);
                        break;
                    }
                }
                try {
                    samples.push_back(make_stage1_sample(image, mask, cfg, epoch_rng));
                } catch (const EmptyMask&) {
                    continue; // augmentation kept emptying the mask; skip this source
                }
            }
        }
        // deterministic shuffle
        for (int i = static_cast<int>(samples.size()) - 1; i > 0; --i)
            std::swap(samples[i], samples[epoch_rng.uniform_int(0, i)]);

        for (size_t base = 0; base + cfg.batch_size <= samples.size(); base += cfg.batch_size) {
            double lr = cfg.lr;
            if (cfg.stage == "static")
                lr = cfg.lr * std::pow(0.5, epoch / std::max(1, cfg.static_lr_halve_every));
            else
                lr = cfg.lr * std::pow(1.0 - static_cast<double>(std::min(step, total_steps - 1)) /
                                                 static_cast<double>(total_steps),
                                       cfg.poly_power);
            optimizer->set_lr(lr);

            std::vector<SequenceSample> batch(samples.begin() + base,
                                              samples.begin() + base + cfg.batch_size);
            const LossBreakdown breakdown = train_step(*model, batch, *optimizer, cfg, epoch_rng);
            ++step;
            if (result.first_loss < 0.0) result.first_loss = breakdown.total;
            result.last_loss = breakdown.total;
            log << step << '\t' << cfg.stage << '\t' << breakdown.fl << '\t' << breakdown.pce
                << '\t' << breakdown.sn << '\t' << breakdown.bpc << '\t' << breakdown.total << '\t'
                << lr << '\n';
            log.flush();
            if (on_step) on_step(step, breakdown);
        }
        // periodic snapshot: long runs survive interruptions
        if ((epoch + 1) % 10 == 0 && epoch + 1 < cfg.epochs) write_checkpoint(epoch + 1);
    }

    write_checkpoint(cfg.epochs);
    result.checkpoint_path = ckpt_path;
    result.steps = step;
    return result;
}

} // namespace scribvos
