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
#include <vector>

#include "scribvos/nn/tensor.hpp"

namespace scribvos {

/// Reliability-leveled store of encoded memory features for one object.
/// The scribble entry is immortal; reliable/entire entries live in aligned
/// FIFO lists capped at the capacity, with the first stored pair (the
/// initial one) exempt from eviction.
class MemoryBank {
public:
    MemoryBank(nn::Var scribble_feature, int frame_index, int capacity);

    /// Appends an aligned (reliable, entire) pair; evicts the earliest
    /// non-initial pair once the list exceeds the capacity.
    void update(nn::Var e_reliable, nn::Var e_entire, int frame_index);

    /// Reference set for the reliable-region step: scribble entry followed
    /// by the reliable entries. Never contains entire-level features.
    std::vector<nn::Var> reference_reliable() const;

    /// Reference set for the entire-target step: scribble entry, the entire
    /// entries, then the encoded query feature last. `e_r_query` may be
    /// undefined (single-step variant).
    std::vector<nn::Var> reference_entire(const nn::Var& e_r_query) const;

    const nn::Var& scribble_entry() const { return m_scribble; }
    int scribble_frame() const { return m_scribble_frame; }
    std::size_t pair_count() const { return m_reliable.size(); }
    int capacity() const { return m_capacity; }
    std::vector<int> stored_frames() const;

    /// One-line state summary (frame indices per level) for debug traces.
    std::string dump() const;

private:
    struct Entry {
        int frame_index;
        nn::Var feature;
    };

    nn::Var m_scribble;
    int m_scribble_frame;
    int m_capacity;
    std::vector<Entry> m_reliable, m_entire;
};

/// Update-schedule predicate: true iff t mod period == 0.
bool should_update(int t, int period);

} // namespace scribvos
