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

#include "scribvos/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>

#include "scribvos/common.hpp"
#include "scribvos/io_image.hpp"

#include <json.hpp>

namespace fs = std::filesystem;

namespace scribvos {

double region_similarity_j(const BinaryMask& pred, const BinaryMask& gt) {
    if (pred.h != gt.h || pred.w != gt.w) throw InvalidInput("mask shapes differ");
    std::size_t inter = 0, uni = 0;
    for (size_t i = 0; i < pred.values.size(); ++i) {
        const bool p = pred.values[i] != 0, g = gt.values[i] != 0;
        inter += (p && g);
        uni += (p || g);
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

BinaryMask boundary_of(const BinaryMask& mask) {
    const BinaryMask eroded = erode(mask, 1);
    BinaryMask out(mask.h, mask.w);
    for (size_t i = 0; i < mask.values.size(); ++i)
        out.values[i] = (mask.values[i] && !eroded.values[i]) ? 1 : 0;
    return out;
}

} // namespace

double contour_accuracy_f(const BinaryMask& pred, const BinaryMask& gt, int tolerance_px) {
    if (pred.h != gt.h || pred.w != gt.w) throw InvalidInput("mask shapes differ");
    const BinaryMask pb = boundary_of(pred);
    const BinaryMask gb = boundary_of(gt);
    const std::size_t np = pb.count(), ng = gb.count();
    if (np == 0 && ng == 0) return 1.0;
    if (np == 0 || ng == 0) return 0.0;

    const BinaryMask gb_zone = dilate(gb, tolerance_px);
    const BinaryMask pb_zone = dilate(pb, tolerance_px);
    std::size_t matched_p = 0, matched_g = 0;
    for (size_t i = 0; i < pb.values.size(); ++i) {
        matched_p += (pb.values[i] && gb_zone.values[i]);
        matched_g += (gb.values[i] && pb_zone.values[i]);
    }
    const double precision = static_cast<double>(matched_p) / static_cast<double>(np);
    const double recall = static_cast<double>(matched_g) / static_cast<double>(ng);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

int default_boundary_tolerance(int h, int w) {
    return static_cast<int>(
        std::ceil(0.008 * std::sqrt(static_cast<double>(h) * h + static_cast<double>(w) * w)));
}

GroupStats compute_group_stats(const std::vector<double>& values) {
    if (values.size() < 2) throw InvalidInput("group statistics need at least two groups");
    GroupStats s;
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    s.range = *mx - *mn;
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (const double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size()); // population
    s.stddev = std::sqrt(var);
    return s;
}

namespace {

std::map<int, LabelMask> load_mask_dir(const fs::path& dir) {
    std::map<int, LabelMask> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".png") continue;
        const std::string stem = entry.path().stem().string();
        if (stem.empty() || !std::all_of(stem.begin(), stem.end(), ::isdigit)) continue;
        out.emplace(std::stoi(stem), read_label_png(entry.path().string()));
    }
    return out;
}

} // namespace

EvalReport evaluate_dataset(const std::string& pred_root, const std::string& gt_root,
                            int tolerance_px) {
    if (!fs::is_directory(gt_root)) throw NotFound("ground-truth root '" + gt_root + "' not found");

    EvalReport report;
    std::vector<std::string> missing;
    int n_sequences = 0;
    double seq_j_sum = 0.0, seq_f_sum = 0.0;

    std::vector<std::string> seq_names;
    for (const auto& entry : fs::directory_iterator(gt_root))
        if (entry.is_directory() && fs::is_directory(entry.path() / "masks"))
            seq_names.push_back(entry.path().filename().string());
    std::sort(seq_names.begin(), seq_names.end());
    if (seq_names.empty()) throw NotFound("no annotated sequences under '" + gt_root + "'");

    for (const auto& name : seq_names) {
        const auto gt_masks = load_mask_dir(fs::path(gt_root) / name / "masks");
        const auto pred_masks = load_mask_dir(fs::path(pred_root) / name);
        if (gt_masks.empty()) continue;

        // first appearance per object
        std::map<int, int> first_seen;
        std::set<int> ids;
        for (const auto& [t, mask] : gt_masks)
            for (const auto v : mask.labels)
                if (v != 0 && v != 255 && !first_seen.count(v)) {
                    first_seen[v] = t;
                    ids.insert(v);
                }

        const int tol = tolerance_px > 0
                            ? tolerance_px
                            : default_boundary_tolerance(gt_masks.begin()->second.h,
                                                         gt_masks.begin()->second.w);

        double obj_j_sum = 0.0, obj_f_sum = 0.0;
        int n_objects = 0;
        for (const int id : ids) {
            double j_sum = 0.0, f_sum = 0.0;
            int n_frames = 0;
            for (const auto& [t, gt_mask] : gt_masks) {
                if (t <= first_seen[id]) continue; // the initialization frame is given
                const auto pit = pred_masks.find(t);
                if (pit == pred_masks.end()) {
                    missing.push_back(name + "/" + std::to_string(t));
                    continue;
                }
                const BinaryMask gt_bin = mask_for_label(gt_mask, id);
                const BinaryMask pred_bin = mask_for_label(pit->second, id);
                j_sum += region_similarity_j(pred_bin, gt_bin);
                f_sum += contour_accuracy_f(pred_bin, gt_bin, tol);
                ++n_frames;
            }
            if (n_frames == 0) continue;
            ObjectScore score;
            score.sequence = name;
            score.object_id = id;
            score.j = j_sum / n_frames;
            score.f = f_sum / n_frames;
            obj_j_sum += score.j;
            obj_f_sum += score.f;
            ++n_objects;
            report.per_object.push_back(std::move(score));
        }
        if (n_objects == 0) continue;
        const double seq_j = obj_j_sum / n_objects, seq_f = obj_f_sum / n_objects;
        report.per_sequence[name] = {seq_j, seq_f};
        seq_j_sum += seq_j;
        seq_f_sum += seq_f;
        ++n_sequences;
    }

    if (!missing.empty()) {
        std::string list;
        for (size_t i = 0; i < missing.size() && i < 8; ++i) list += (i ? ", " : "") + missing[i];
        if (missing.size() > 8) list += ", ...";
        throw IncompleteResults("missing prediction frames: " + list);
    }
    if (n_sequences == 0) throw NotFound("no evaluable sequences");
    report.mean_j = seq_j_sum / n_sequences;
    report.mean_f = seq_f_sum / n_sequences;
    report.mean_jf = 0.5 * (report.mean_j + report.mean_f);
    return report;
}

EvalReport evaluate_groups(const std::vector<std::string>& pred_roots, const std::string& gt_root,
                           int tolerance_px) {
    if (pred_roots.empty()) throw InvalidInput("no prediction roots given");
    EvalReport merged;
    for (const auto& root : pred_roots) {
        EvalReport r = evaluate_dataset(root, gt_root, tolerance_px);
        merged.group_j.push_back(r.mean_j);
        merged.group_f.push_back(r.mean_f);
        merged.group_jf.push_back(r.mean_jf);
        if (merged.per_object.empty()) {
            merged.per_object = std::move(r.per_object);
            merged.per_sequence = std::move(r.per_sequence);
        }
    }
    double jm = 0.0, fm = 0.0;
    for (size_t g = 0; g < merged.group_jf.size(); ++g) {
        jm += merged.group_j[g];
        fm += merged.group_f[g];
    }
    merged.mean_j = jm / merged.group_j.size();
    merged.mean_f = fm / merged.group_f.size();
    merged.mean_jf = 0.5 * (merged.mean_j + merged.mean_f);
    if (merged.group_jf.size() >= 2) {
        merged.stats_jf = compute_group_stats(merged.group_jf);
        merged.stats_j = compute_group_stats(merged.group_j);
        merged.stats_f = compute_group_stats(merged.group_f);
    }
    return merged;
}

std::string EvalReport::to_table() const {
    std::ostringstream out;
    char line[160];
    out << "sequence                     J       F       J&F\n";
    for (const auto& [name, jf] : per_sequence) {
        std::snprintf(line, sizeof(line), "%-26s %7.4f %7.4f %7.4f\n", name.c_str(), jf.first,
                      jf.second, 0.5 * (jf.first + jf.second));
        out << line;
    }
    std::snprintf(line, sizeof(line), "%-26s %7.4f %7.4f %7.4f\n", "GLOBAL", mean_j, mean_f,
                  mean_jf);
    out << line;
    if (stats_jf) {
        out << "groups (J&F):";
        for (const double v : group_jf) {
            std::snprintf(line, sizeof(line), " %.4f", v);
            out << line;
        }
        std::snprintf(line, sizeof(line), "\nrange %.4f  stddev %.4f\n", stats_jf->range,
                      stats_jf->stddev);
        out << line;
    }
    return out.str();
}

std::string EvalReport::to_json() const {
    nlohmann::json j;
    j["mean_j"] = mean_j;
    j["mean_f"] = mean_f;
    j["mean_jf"] = mean_jf;
    for (const auto& [name, jf] : per_sequence) {
        j["sequences"][name]["j"] = jf.first;
        j["sequences"][name]["f"] = jf.second;
    }
    for (const auto& score : per_object) {
        nlohmann::json o;
        o["sequence"] = score.sequence;
        o["object_id"] = score.object_id;
        o["j"] = score.j;
        o["f"] = score.f;
        j["objects"].push_back(o);
    }
    if (stats_jf) {
        j["groups"]["jf"] = group_jf;
        j["groups"]["j"] = group_j;
        j["groups"]["f"] = group_f;
        j["groups"]["range_jf"] = stats_jf->range;
        j["groups"]["stddev_jf"] = stats_jf->stddev;
    }
    return j.dump(2);
}

} // namespace scribvos
