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

#include "scribvos/model/membank.hpp"

#include <sstream>

namespace scribvos {

MemoryBank::MemoryBank(nn::Var scribble_feature, int frame_index, int capacity)
    : m_scribble(std::move(scribble_feature)), m_scribble_frame(frame_index),
      m_capacity(capacity) {
    if (!m_scribble.defined()) throw InvalidInput("memory bank needs a scribble entry");
    if (capacity < 1) throw InvalidInput("memory capacity must be >= 1");
}

void MemoryBank::update(nn::Var e_reliable, nn::Var e_entire, int frame_index) {
    if (!m_reliable.empty() && frame_index <= m_reliable.back().frame_index)
        throw InvalidInput("memory update with out-of-order frame index " +
                           std::to_string(frame_index));
    m_reliable.push_back({frame_index, std::move(e_reliable)});
    m_entire.push_back({frame_index, std::move(e_entire)});
    if (static_cast<int>(m_reliable.size()) > m_capacity) {
        // FIFO over non-initial pairs; the first stored pair never leaves
        m_reliable.erase(m_reliable.begin() + 1);
        m_entire.erase(m_entire.begin() + 1);
    }
}

std::vector<nn::Var> MemoryBank::reference_reliable() const {
    std::vector<nn::Var> out;
    out.reserve(1 + m_reliable.size());
    out.push_back(m_scribble);
    for (const auto& e : m_reliable) out.push_back(e.feature);
    return out;
}

std::vector<nn::Var> MemoryBank::reference_entire(const nn::Var& e_r_query) const {
    std::vector<nn::Var> out;
    out.reserve(2 + m_entire.size());
    out.push_back(m_scribble);
    for (const auto& e : m_entire) out.push_back(e.feature);
    if (e_r_query.defined()) out.push_back(e_r_query);
    return out;
}

std::vector<int> MemoryBank::stored_frames() const {
    std::vector<int> out;
    out.reserve(m_reliable.size());
    for (const auto& e : m_reliable) out.push_back(e.frame_index);
    return out;
}

std::string MemoryBank::dump() const {
    std::ostringstream ss;
    ss << "scribble@" << m_scribble_frame << " pairs[";
    for (size_t i = 0; i < m_reliable.size(); ++i) ss << (i ? "," : "") << m_reliable[i].frame_index;
    ss << "] capacity=" << m_capacity;
    return ss.str();
}

bool should_update(int t, int period) {
    if (t < 0) throw InvalidInput("negative frame index");
    if (period < 1) throw InvalidInput("update period must be >= 1");
    return t % period == 0;
}

} // namespace scribvos
