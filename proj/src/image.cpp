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

#include "scribvos/image.hpp"

#include <vector>

namespace scribvos {

BinaryMask dilate(const BinaryMask& m, int radius) {
    if (radius <= 0) return m;
    BinaryMask out(m.h, m.w);
    for (int y = 0; y < m.h; ++y) {
        for (int x = 0; x < m.w; ++x) {
            if (!m.at(y, x)) continue;
            const int y0 = std::max(0, y - radius), y1 = std::min(m.h - 1, y + radius);
            const int x0 = std::max(0, x - radius), x1 = std::min(m.w - 1, x + radius);
            for (int yy = y0; yy <= y1; ++yy)
                for (int xx = x0; xx <= x1; ++xx)
                    out.at(yy, xx) = 1;
        }
    }
    return out;
}

BinaryMask erode(const BinaryMask& m, int radius) {
    if (radius <= 0) return m;
    BinaryMask out(m.h, m.w);
    for (int y = 0; y < m.h; ++y) {
        for (int x = 0; x < m.w; ++x) {
            bool all = true;
            for (int dy = -radius; dy <= radius && all; ++dy) {
                for (int dx = -radius; dx <= radius; ++dx) {
                    const int yy = y + dy, xx = x + dx;
                    if (yy < 0 || yy >= m.h || xx < 0 || xx >= m.w || !m.at(yy, xx)) {
                        all = false;
                        break;
                    }
                }
            }
            out.at(y, x) = all ? 1 : 0;
        }
    }
    return out;
}

int connected_components(const BinaryMask& m) {
    std::vector<char> seen(m.values.size(), 0);
    std::vector<int> stack;
    int count = 0;
    for (int start = 0; start < static_cast<int>(m.values.size()); ++start) {
        if (!m.values[start] || seen[start]) continue;
        ++count;
        stack.push_back(start);
        seen[start] = 1;
        while (!stack.empty()) {
            const int idx = stack.back();
            stack.pop_back();
            const int y = idx / m.w, x = idx % m.w;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int yy = y + dy, xx = x + dx;
                    if (yy < 0 || yy >= m.h || xx < 0 || xx >= m.w) continue;
                    const int nidx = yy * m.w + xx;
                    if (m.values[nidx] && !seen[nidx]) {
                        seen[nidx] = 1;
                        stack.push_back(nidx);
                    }
                }
            }
        }
    }
    return count;
}

} // namespace scribvos
