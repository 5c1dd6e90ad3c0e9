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

#include <string>

namespace scribvos {

/// Renders the per-step total (and component) loss curves of a training log
/// to a PNG line chart.
void plot_loss_curves(const std::string& loss_log_path, const std::string& out_png);

/// Renders per-sequence J/F bar pairs from an evaluation report (JSON).
void plot_jf_bars(const std::string& report_json_path, const std::string& out_png);

} // namespace scribvos
