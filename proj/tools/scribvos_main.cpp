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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "scribvos/eval.hpp"
#include "scribvos/infer.hpp"
#include "scribvos/io_image.hpp"
#include "scribvos/plot.hpp"
#include "scribvos/scribble.hpp"
#include "scribvos/synth.hpp"
#include "scribvos/train.hpp"

namespace fs = std::filesystem;
using namespace scribvos;

namespace {

/// Options shared by every subcommand; flags take precedence over the
/// config file, which takes precedence over defaults.
struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    bool seed_given = false;

    Config resolve() const {
        Config cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw InvalidInput("--set expects key=value, got '" + kv + "'");
            apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (seed_given) cfg.seed = seed;
        cfg.validate();
        return cfg;
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "key = value config file");
    cmd->add_option("--set", opts.sets, "override a config key (key=value, repeatable)");
    cmd->add_option("--seed", opts.seed, "RNG seed")->each([&opts](const std::string&) {
        opts.seed_given = true;
    });
}

void apply_lambda_list(Config& cfg, const std::string& lambdas) {
    std::istringstream ss(lambdas);
    std::string item;
    std::vector<double> values;
    while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
    if (values.size() != 4) throw InvalidInput("--lambda expects four comma-separated weights");
    cfg.lambda_fl = values[0];
    cfg.lambda_pce = values[1];
    cfg.lambda_sn = values[2];
    cfg.lambda_bpc = values[3];
}

/// Builds the scribble raster of one annotated frame: object strokes at
/// their palette indices, the background stroke at 255.
LabelMask scribble_raster_for(const LabelMask& mask, const Config& cfg, Rng& rng) {
    LabelMask raster(mask.h, mask.w);
    std::vector<BinaryMask> object_masks;
    std::vector<int> ids;
    for (int id = 1; id < 255; ++id) {
        BinaryMask m = mask_for_label(mask, id);
        if (m.count() == 0) continue;
        ids.push_back(id);
        object_masks.push_back(std::move(m));
    }
    ScribbleParams params;
    params.stroke_width = cfg.scribble_stroke_width;
    params.subsample_fraction = cfg.scribble_subsample;
    params.jitter_px = cfg.scribble_jitter;
    for (size_t k = 0; k < ids.size(); ++k) {
        params.rng_seed = rng.next_u64();
        const ScribbleMap s = synthesize_scribble(object_masks[k], params, ids[k]);
        for (size_t i = 0; i < s.mask.values.size(); ++i)
            if (s.mask.values[i]) raster.labels[i] = static_cast<std::uint8_t>(ids[k]);
    }
    if (!ids.empty()) {
        try {
            params.rng_seed = rng.next_u64();
            const ScribbleMap bg = synthesize_background_scribble(object_masks, params);
            for (size_t i = 0; i < bg.mask.values.size(); ++i)
                if (bg.mask.values[i] && raster.labels[i] == 0) raster.labels[i] = 255;
        } catch (const EmptyMask&) {
            // fully covered frame: skip the background stroke
        }
    }
    return raster;
}

int cmd_synth_data(const CommonOpts& common, const std::string& out, int clips, int height,
                   int width, int length, int objects, bool distractors) {
    const Config cfg = common.resolve();
    generate_dataset(out, clips, height, width, length, objects, distractors, cfg.seed);
    std::cout << "wrote " << clips << " clips under " << out << "\n";
    return 0;
}

int cmd_synth_scribbles(const CommonOpts& common, const std::string& data,
                        const std::string& frames_mode) {
    const Config cfg = common.resolve();
    int written = 0;
    for (const auto& name : list_sequences(data)) {
        VideoSequence seq = load_sequence(data, name);
        if (seq.masks.empty())
            throw InvalidInput("sequence '" + name + "' has no masks to synthesize from");
        Rng seq_rng(Rng(cfg.seed).fork(std::hash<std::string>{}(name)));
        fs::create_directories(fs::path(data) / name / "scribbles");
        std::set<int> seen;
        for (const auto& [index, mask] : seq.masks) {
            Rng frame_rng(seq_rng.fork(index));
            LabelMask raster = scribble_raster_for(mask, cfg, frame_rng);
            if (frames_mode == "first") {
                // keep only strokes of objects appearing for the first time
                LabelMask filtered(raster.h, raster.w);
                bool any = false;
                for (int id = 1; id < 255; ++id) {
                    if (seen.count(id)) continue;
                    if (mask_for_label(mask, id).count() == 0) continue;
                    seen.insert(id);
                    for (size_t i = 0; i < raster.labels.size(); ++i)
                        if (raster.labels[i] == id) filtered.labels[i] = raster.labels[i];
                    any = true;
                }
                if (!any) continue;
                raster = std::move(filtered);
            }
            char fname[16];
            std::snprintf(fname, sizeof(fname), "%05d.png", index);
            write_label_png((fs::path(data) / name / "scribbles" / fname).string(), raster);
            ++written;
        }
    }
    std::cout << "wrote " << written << " scribble rasters\n";
    return 0;
}

int cmd_train(const CommonOpts& common, Config cfg, const std::string& data,
              const std::string& out, const std::optional<std::string>& resume,
              int windows_per_clip) {
    (void)common;
    const TrainResult result = run_training(cfg, data, out, resume, windows_per_clip);
    std::cout << "trained " << result.steps << " steps; checkpoint: " << result.checkpoint_path
              << "\n";
    return 0;
}

int cmd_infer(const std::string& checkpoint, const std::vector<std::string>& sequence_dirs,
              const std::string& scribble_dir, const std::string& out_dir,
              const InferenceOptions& options) {
    auto [model, ckpt] = Model::load(checkpoint);
    for (const auto& seq_dir : sequence_dirs) {
        const fs::path p(seq_dir);
        VideoSequence seq = load_sequence(p.parent_path().string(), p.filename().string());
        if (!scribble_dir.empty()) {
            seq.scribbles.clear();
            for (const auto& entry : fs::directory_iterator(scribble_dir)) {
                if (entry.path().extension() != ".png") continue;
                const std::string stem = entry.path().stem().string();
                if (stem.empty() || !std::all_of(stem.begin(), stem.end(), ::isdigit)) continue;
                seq.scribbles[std::stoi(stem)] = read_label_png(entry.path().string());
            }
        }
        const InferenceResult result = run_sequence(*model, seq, options);
        emit_results(result.masks, out_dir, seq.name);
        if (options.keep_bank_trace) {
            fs::create_directories(fs::path(out_dir) / seq.name);
            std::ofstream trace(fs::path(out_dir) / seq.name / "bank_trace.txt");
            for (size_t t = 0; t < result.bank_trace.size(); ++t)
                trace << "frame " << t << ": " << result.bank_trace[t] << "\n";
        }
        if (options.dump_prob_maps) {
            for (const auto& [frame, per_object] : result.probs)
                for (const auto& [object_id, pm] : per_object) {
                    Image vis(pm.h, pm.w);
                    for (int y = 0; y < pm.h; ++y)
                        for (int x = 0; x < pm.w; ++x)
                            for (int c = 0; c < 3; ++c) vis.at(y, x, c) = pm.at(y, x);
                    char fname[48];
                    std::snprintf(fname, sizeof(fname), "%05d_obj%02d_prob.png", frame, object_id);
                    write_image_png((fs::path(out_dir) / seq.name / fname).string(), vis);
                }
        }
        std::cout << seq.name << ": " << result.masks.size() << " masks\n";
    }
    return 0;
}

int cmd_eval(const std::string& pred, const std::vector<std::string>& groups,
             const std::string& gt, const std::string& out_prefix, int tolerance) {
    EvalReport report;
    if (!groups.empty()) report = evaluate_groups(groups, gt, tolerance);
    else report = evaluate_dataset(pred, gt, tolerance);
    std::cout << report.to_table();
    if (!out_prefix.empty()) {
        std::ofstream txt(out_prefix + ".txt");
        txt << report.to_table();
        std::ofstream json(out_prefix + ".json");
        json << report.to_json() << "\n";
        if (!txt || !json) throw IOError("cannot write report files at '" + out_prefix + "'");
    }
    return 0;
}

int cmd_plot(const std::string& loss_log, const std::string& report, const std::string& out_dir) {
    fs::create_directories(out_dir);
    if (loss_log.empty() && report.empty())
        throw InvalidInput("plot needs --loss-log and/or --report");
    if (!loss_log.empty())
        plot_loss_curves(loss_log, (fs::path(out_dir) / "loss_curve.png").string());
    if (!report.empty()) plot_jf_bars(report, (fs::path(out_dir) / "jf_bars.png").string());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"scribble-initialized video object segmentation toolkit"};
    app.require_subcommand(1);

    // synth-data
    auto* synth = app.add_subcommand("synth-data", "generate a synthetic clip dataset");
    CommonOpts synth_common;
    add_common(synth, synth_common);
    std::string synth_out;
    int clips = 20, height = 128, width = 128, length = 10, objects = 2;
    bool distractors = false;
    synth->add_option("--out", synth_out, "output dataset root")->required();
    synth->add_option("--clips", clips, "number of clips");
    synth->add_option("--height", height, "canvas height");
    synth->add_option("--width", width, "canvas width");
    synth->add_option("--length", length, "frames per clip");
    synth->add_option("--objects", objects, "objects per clip");
    synth->add_flag("--distractors", distractors, "clone the first object in half of the clips");

    // synth-scribbles
    auto* scrib = app.add_subcommand("synth-scribbles", "synthesize scribble annotations from masks");
    CommonOpts scrib_common;
    add_common(scrib, scrib_common);
    std::string scrib_data, frames_mode = "all";
    scrib->add_option("--data", scrib_data, "dataset root")->required();
    scrib->add_option("--frames", frames_mode, "all | first (first appearance only)")
        ->check(CLI::IsMember({"all", "first"}));

    // train
    auto* train = app.add_subcommand("train", "train a model");
    CommonOpts train_common;
    add_common(train, train_common);
    std::string train_data, train_out, lambdas;
    std::string resume_path;
    int windows_per_clip = 2;
    std::string stage;
    int epochs = -1, batch_size = -1, feat_channels = -1, clip_length = -1;
    double lr = -1.0;
    bool single_step = false, shared_embedding = false;
    train->add_option("--data", train_data, "dataset root")->required();
    train->add_option("--out", train_out, "output directory")->required();
    train->add_option("--resume", resume_path, "checkpoint to resume from");
    train->add_option("--windows-per-clip", windows_per_clip, "training windows per clip per epoch");
    train->add_option("--stage", stage, "static | video");
    train->add_option("--epochs", epochs, "training epochs");
    train->add_option("--batch-size", batch_size, "batch size");
    train->add_option("--lr", lr, "base learning rate");
    train->add_option("--lambda", lambdas, "four loss weights, comma separated");
    train->add_option("--feat-channels", feat_channels, "matching feature width c");
    train->add_option("--clip-length", clip_length, "training sample length L");
    train->add_flag("--single-step", single_step, "ablation: skip the reliable-region step");
    train->add_flag("--shared-level-embedding", shared_embedding,
                    "ablation: one embedding for all levels");

    // infer
    auto* infer = app.add_subcommand("infer", "segment sequences from initial scribbles");
    CommonOpts infer_common;
    add_common(infer, infer_common);
    std::string checkpoint, scribble_dir, infer_out, infer_data;
    std::vector<std::string> sequence_dirs;
    InferenceOptions inf_options;
    bool dump_probs = false;
    infer->add_option("--checkpoint", checkpoint, "trained model checkpoint")->required();
    infer->add_option("--sequence-dir", sequence_dirs, "sequence directory (repeatable)");
    infer->add_option("--data", infer_data, "dataset root: process every sequence");
    infer->add_option("--scribble-dir", scribble_dir, "override directory of scribble PNGs");
    infer->add_option("--out-dir", infer_out, "output root for mask PNGs")->required();
    infer->add_option("--memory-capacity", inf_options.memory_capacity, "memory capacity");
    infer->add_option("--update-period", inf_options.update_period, "memory update period");
    infer->add_flag("--dump-prob-maps", dump_probs, "also write per-object probability maps");
    infer->add_flag("--dump-bank-trace", inf_options.keep_bank_trace,
                    "write the per-frame memory state to bank_trace.txt");

    // eval
    auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
    CommonOpts eval_common;
    add_common(eval, eval_common);
    std::string pred_root, gt_root, out_prefix;
    std::vector<std::string> group_roots;
    int tolerance = 0;
    eval->add_option("--pred", pred_root, "prediction root");
    eval->add_option("--groups", group_roots, "prediction roots, one per scribble group");
    eval->add_option("--gt", gt_root, "ground-truth dataset root")->required();
    eval->add_option("--out", out_prefix, "report path prefix (.txt/.json)");
    eval->add_option("--tolerance", tolerance, "boundary tolerance in px (0 = auto)");

    // plot
    auto* plot = app.add_subcommand("plot", "render loss curves and J/F charts");
    CommonOpts plot_common;
    add_common(plot, plot_common);
    std::string loss_log, report_json, plot_out = ".";
    plot->add_option("--loss-log", loss_log, "training loss log (TSV)");
    plot->add_option("--report", report_json, "evaluation report (JSON)");
    plot->add_option("--out-dir", plot_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed())
            return cmd_synth_data(synth_common, synth_out, clips, height, width, length, objects,
                                  distractors);
        if (scrib->parsed()) return cmd_synth_scribbles(scrib_common, scrib_data, frames_mode);
        if (train->parsed()) {
            Config cfg = train_common.resolve();
            if (!stage.empty()) cfg.stage = stage;
            if (epochs >= 0) cfg.epochs = epochs;
            if (batch_size > 0) cfg.batch_size = batch_size;
            if (lr > 0) cfg.lr = lr;
            if (feat_channels > 0) cfg.feat_channels = feat_channels;
            if (clip_length > 0) cfg.clip_length = clip_length;
            if (single_step) cfg.single_step = true;
            if (shared_embedding) cfg.shared_level_embedding = true;
            if (!lambdas.empty()) apply_lambda_list(cfg, lambdas);
            cfg.validate();
            return cmd_train(train_common, cfg, train_data, train_out,
                             resume_path.empty() ? std::nullopt
                                                 : std::optional<std::string>(resume_path),
                             windows_per_clip);
        }
        if (infer->parsed()) {
            const Config cfg = infer_common.resolve();
            if (!infer->count("--memory-capacity")) inf_options.memory_capacity = cfg.memory_capacity;
            if (!infer->count("--update-period")) inf_options.update_period = cfg.update_period;
            inf_options.dump_prob_maps = dump_probs;
            std::vector<std::string> dirs = sequence_dirs;
            if (!infer_data.empty())
                for (const auto& name : list_sequences(infer_data))
                    dirs.push_back((fs::path(infer_data) / name).string());
            if (dirs.empty()) throw InvalidInput("give --sequence-dir or --data");
            return cmd_infer(checkpoint, dirs, scribble_dir, infer_out, inf_options);
        }
        if (eval->parsed()) {
            if (pred_root.empty() && group_roots.empty())
                throw InvalidInput("give --pred or --groups");
            return cmd_eval(pred_root, group_roots, gt_root, out_prefix, tolerance);
        }
        if (plot->parsed()) return cmd_plot(loss_log, report_json, plot_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: Internal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
