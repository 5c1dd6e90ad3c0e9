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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "scribvos/model/membank.hpp"
#include "scribvos/rng.hpp"

using namespace scribvos;
using nn::Var;

namespace {

Var tagged_feature(double tag) { return Var::full({2, 2, 4}, tag); }

/// Pure bookkeeping oracle of the memory schedule: stores frame indices
/// only, FIFO over non-initial entries, initial pair exempt.
struct BankSimulation {
    std::vector<int> frames;
    int capacity;

    void update(int t) {
        frames.push_back(t);
        if (static_cast<int>(frames.size()) > capacity) frames.erase(frames.begin() + 1);
    }
};

} // namespace

TEST_CASE("fresh bank holds only the scribble entry") {
    MemoryBank bank(tagged_feature(1.0), 0, 4);
    CHECK(bank.pair_count() == 0);
    CHECK(bank.reference_reliable().size() == 1);
    CHECK(bank.reference_entire(Var()).size() == 1);
    const Var e_r_q = tagged_feature(9.0);
    const auto ref = bank.reference_entire(e_r_q);
    REQUIRE(ref.size() == 2);
    CHECK(ref[0].value()[0] == 1.0); // scribble first
    CHECK(ref[1].value()[0] == 9.0); // query last
}

TEST_CASE("update schedule predicate") {
    CHECK(should_update(0, 6));
    CHECK(should_update(6, 6));
    CHECK_FALSE(should_update(5, 6));
    CHECK(should_update(3, 1));
    CHECK_THROWS_AS(should_update(-1, 6), InvalidInput);
    CHECK_THROWS_AS(should_update(0, 0), InvalidInput);
}

TEST_CASE("eviction keeps the initial pair and drops the earliest other") {
    MemoryBank bank(tagged_feature(0.5), 0, 4);
    for (const int t : {0, 6, 12, 18}) bank.update(tagged_feature(t), tagged_feature(t + 0.5), t);
    CHECK(bank.stored_frames() == std::vector<int>{0, 6, 12, 18});
    bank.update(tagged_feature(24), tagged_feature(24.5), 24);
    CHECK(bank.stored_frames() == std::vector<int>{0, 12, 18, 24});
    bank.update(tagged_feature(30), tagged_feature(30.5), 30);
    CHECK(bank.stored_frames() == std::vector<int>{0, 18, 24, 30});
}

TEST_CASE("capacity one accepts the initial pair only") {
    MemoryBank bank(tagged_feature(0.0), 0, 1);
    bank.update(tagged_feature(1.0), tagged_feature(1.5), 0);
    CHECK(bank.pair_count() == 1);
    bank.update(tagged_feature(2.0), tagged_feature(2.5), 6);
    // the newcomer is the earliest non-initial pair; it leaves immediately
    CHECK(bank.stored_frames() == std::vector<int>{0});
}

TEST_CASE("out-of-order updates are rejected") {
    MemoryBank bank(tagged_feature(0.0), 0, 4);
    bank.update(tagged_feature(1.0), tagged_feature(1.0), 6);
    CHECK_THROWS_AS(bank.update(tagged_feature(2.0), tagged_feature(2.0), 6), InvalidInput);
    CHECK_THROWS_AS(bank.update(tagged_feature(2.0), tagged_feature(2.0), 3), InvalidInput);
}

TEST_CASE("bank trace matches the bookkeeping simulation over 100 frames") {
    const int period = 6, capacity = 4;
    MemoryBank bank(tagged_feature(0.0), 0, capacity);
    BankSimulation sim{{}, capacity};
    for (int t = 0; t < 100; ++t) {
        if (!should_update(t, period)) continue;
        bank.update(tagged_feature(t), tagged_feature(t), t);
        sim.update(t);
        CHECK(bank.stored_frames() == sim.frames);
    }
    CHECK(bank.stored_frames() == std::vector<int>{0, 84, 90, 96});
}

TEST_CASE("property: random schedules keep size, FIFO order, and the initial pair") {
    Rng rng(55);
    for (int trial = 0; trial < 100; ++trial) {
        const int period = rng.uniform_int(1, 9);
        const int capacity = rng.uniform_int(1, 6);
        const int frames = rng.uniform_int(1, 60);
        MemoryBank bank(tagged_feature(0.0), 0, capacity);
        BankSimulation sim{{}, capacity};
        bool any_update = false;
        for (int t = 0; t < frames; ++t) {
            if (!should_update(t, period)) continue;
            bank.update(tagged_feature(t), tagged_feature(t), t);
            sim.update(t);
            any_update = true;
            CHECK(bank.pair_count() <= static_cast<size_t>(capacity));
            CHECK(bank.stored_frames() == sim.frames);
            CHECK(bank.stored_frames().front() == 0); // initial retention
            // strictly increasing (suffix of the update schedule)
            const auto stored = bank.stored_frames();
            for (size_t i = 1; i < stored.size(); ++i) CHECK(stored[i - 1] < stored[i]);
        }
        if (any_update) CHECK(bank.reference_reliable().size() == bank.pair_count() + 1);
    }
}

TEST_CASE("reference sets never leak across levels") {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const int capacity = rng.uniform_int(1, 5);
        MemoryBank bank(tagged_feature(-1.0), 0, capacity);
        std::set<const nn::Node*> reliable_nodes, entire_nodes;
        std::vector<Var> keep_alive; // stop freed nodes from recycling addresses
        int t = 0;
        const int updates = rng.uniform_int(0, 8);
        for (int u = 0; u < updates; ++u) {
            Var e_r = tagged_feature(t), e_e = tagged_feature(t + 0.5);
            reliable_nodes.insert(e_r.node().get());
            entire_nodes.insert(e_e.node().get());
            keep_alive.push_back(e_r);
            keep_alive.push_back(e_e);
            bank.update(e_r, e_e, t);
            t += rng.uniform_int(1, 5);
        }
        const Var query = tagged_feature(99.0);
        const auto ref_r = bank.reference_reliable();
        CHECK(ref_r.front().node().get() == bank.scribble_entry().node().get());
        for (const auto& v : ref_r) CHECK(entire_nodes.count(v.node().get()) == 0);

        const auto ref_e = bank.reference_entire(query);
        CHECK(ref_e.front().node().get() == bank.scribble_entry().node().get());
        CHECK(ref_e.back().node().get() == query.node().get());
        for (const auto& v : ref_e) CHECK(reliable_nodes.count(v.node().get()) == 0);
    }
}

TEST_CASE("dump reports the stored frame indices") {
    MemoryBank bank(tagged_feature(0.0), 0, 2);
    bank.update(tagged_feature(1.0), tagged_feature(1.0), 0);
    bank.update(tagged_feature(2.0), tagged_feature(2.0), 6);
    const std::string dump = bank.dump();
    CHECK(dump.find("0,6") != std::string::npos);
    CHECK(dump.find("capacity=2") != std::string::npos);
}
