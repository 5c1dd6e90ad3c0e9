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

/// Region similarity: intersection over union; 1 when both masks are empty.
double region_similarity_j(const BinaryMask& pred, const BinaryMask& gt);

/// Boundary F-measure: boundaries are mask minus erosion; matching within
/// `tolerance_px` Chebyshev distance (dilation-based); 1 when both
/// boundaries are empty, 0 when exactly one is.
double contour_accuracy_f(const BinaryMask& pred, const BinaryMask& gt, int tolerance_px);

/// The conventional tolerance: ceil(0.008 * image diagonal).
int default_boundary_tolerance(int h, int w);

struct ObjectScore {
    std::string sequence;
    int object_id = 0;
    double j = 0.0, f = 0.0;
};

struct GroupStats {
    double range = 0.0;
    double stddev = 0.0; // population
};

GroupStats compute_group_stats(const std::vector<double>& values);

struct EvalReport {
    std::vector<ObjectScore> per_object;
    std::map<std::string, std::pair<double, double>> per_sequence; // J, F means
    double mean_j = 0.0, mean_f = 0.0, mean_jf = 0.0;

    // present only with >= 2 groups
    std::vector<double> group_jf, group_j, group_f;
    std::optional<GroupStats> stats_jf, stats_j, stats_f;

    std::string to_table() const;
    std::string to_json() const;
};

/// Scores predictions under `pred_root/<seq>/NNNNN.png` against ground truth
/// masks in the dataset layout `gt_root/<seq>/masks/NNNNN.png`. Per-object
/// scores over every annotated frame after the object's first appearance,
/// averaged per sequence, then across sequences.
EvalReport evaluate_dataset(const std::string& pred_root, const std::string& gt_root,
                            int tolerance_px = 0);

/// Multi-group protocol: one prediction root per initialization-scribble
/// group; reports per-group scores plus range and population standard
/// deviation.
EvalReport evaluate_groups(const std::vector<std::string>& pred_roots, const std::string& gt_root,
                           int tolerance_px = 0);

} // namespace scribvos
