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

#include "scribvos/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "scribvos/common.hpp"
#include "scribvos/io_image.hpp"

#include <json.hpp>

namespace scribvos {

namespace {

struct Canvas {
    Image img;
    explicit Canvas(int h, int w) : img(h, w, 1.0) {}

    void pixel(int y, int x, double r, double g, double b) {
        if (y < 0 || y >= img.h || x < 0 || x >= img.w) return;
        img.at(y, x, 0) = r;
        img.at(y, x, 1) = g;
        img.at(y, x, 2) = b;
    }

    void line(double y0, double x0, double y1, double x1, double r, double g, double b) {
        const int steps = std::max(2, static_cast<int>(std::max(std::abs(y1 - y0), std::abs(x1 - x0))) * 2);
        for (int i = 0; i <= steps; ++i) {
            const double t = static_cast<double>(i) / steps;
            pixel(static_cast<int>(std::lround(y0 + t * (y1 - y0))),
                  static_cast<int>(std::lround(x0 + t * (x1 - x0))), r, g, b);
        }
    }

    void rect(int y0, int x0, int y1, int x1, double r, double g, double b) {
        for (int y = std::max(0, y0); y <= std::min(img.h - 1, y1); ++y)
            for (int x = std::max(0, x0); x <= std::min(img.w - 1, x1); ++x)
                pixel(y, x, r, g, b);
    }
};

struct Series {
    std::vector<double> values;
    double r, g, b;
};

void plot_series(Canvas& canvas, const std::vector<Series>& series, int margin) {
    double lo = 0.0, hi = 1e-9;
    std::size_t n = 0;
    for (const auto& s : series) {
        for (const double v : s.values) hi = std::max(hi, v);
        n = std::max(n, s.values.size());
    }
    if (n < 2) n = 2;
    const int h = canvas.img.h, w = canvas.img.w;
    canvas.line(margin, margin, h - margin, margin, 0, 0, 0);
    canvas.line(h - margin, margin, h - margin, w - margin, 0, 0, 0);
    for (const auto& s : series) {
        for (size_t i = 0; i + 1 < s.values.size(); ++i) {
            auto ymap = [&](double v) {
                return (h - margin) - (v - lo) / (hi - lo) * (h - 2 * margin);
            };
            auto xmap = [&](size_t idx) {
                return margin + static_cast<double>(idx) / (n - 1) * (w - 2 * margin);
            };
            canvas.line(ymap(s.values[i]), xmap(i), ymap(s.values[i + 1]), xmap(i + 1), s.r, s.g,
                        s.b);
        }
    }
}

} // namespace

void plot_loss_curves(const std::string& loss_log_path, const std::string& out_png) {
    std::ifstream in(loss_log_path);
    if (!in) throw NotFound("loss log '" + loss_log_path + "' not found");
    std::string line;
    std::getline(in, line); // header
    Series total{{}, 0.85, 0.25, 0.2}, fl{{}, 0.2, 0.45, 0.8}, pce{{}, 0.2, 0.65, 0.3},
        sn{{}, 0.75, 0.55, 0.15}, bpc{{}, 0.55, 0.3, 0.7};
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string step, stage;
        double v_fl, v_pce, v_sn, v_bpc, v_total, lr;
        row >> step >> stage >> v_fl >> v_pce >> v_sn >> v_bpc >> v_total >> lr;
        if (row.fail()) continue;
        fl.values.push_back(v_fl);
        pce.values.push_back(v_pce);
        sn.values.push_back(v_sn);
        bpc.values.push_back(v_bpc);
        total.values.push_back(v_total);
    }
    if (total.values.empty()) throw MalformedData("loss log has no data rows");
    Canvas canvas(480, 720);
    plot_series(canvas, {total, fl, pce, sn, bpc}, 40);
    write_image_png(out_png, canvas.img);
}

void plot_jf_bars(const std::string& report_json_path, const std::string& out_png) {
    std::ifstream in(report_json_path);
    if (!in) throw NotFound("report '" + report_json_path + "' not found");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw MalformedData(std::string("bad report JSON: ") + e.what());
    }
    if (!j.contains("sequences")) throw MalformedData("report has no per-sequence scores");

    std::vector<std::pair<double, double>> bars;
    for (const auto& [name, entry] : j["sequences"].items())
        bars.emplace_back(entry["j"].get<double>(), entry["f"].get<double>());
    if (bars.empty()) throw MalformedData("report has no sequences");

    const int margin = 40;
    Canvas canvas(480, std::max(720, margin * 2 + static_cast<int>(bars.size()) * 14));
    const int h = canvas.img.h;
    canvas.line(margin, margin, h - margin, margin, 0, 0, 0);
    canvas.line(h - margin, margin, h - margin, canvas.img.w - margin, 0, 0, 0);
    int x = margin + 4;
    for (const auto& [jv, fv] : bars) {
        const int jh = static_cast<int>((h - 2 * margin) * std::clamp(jv, 0.0, 1.0));
        const int fh = static_cast<int>((h - 2 * margin) * std::clamp(fv, 0.0, 1.0));
        canvas.rect(h - margin - jh, x, h - margin - 1, x + 4, 0.2, 0.45, 0.8);
        canvas.rect(h - margin - fh, x + 6, h - margin - 1, x + 10, 0.85, 0.25, 0.2);
        x += 14;
    }
    write_image_png(out_png, canvas.img);
}

} // namespace scribvos
