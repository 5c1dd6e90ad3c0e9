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

#include "scribvos/rng.hpp"
#include "scribvos/scribble.hpp"

using namespace scribvos;

namespace {

BinaryMask filled_rect(int h, int w, int y0, int x0, int y1, int x1) {
    BinaryMask m(h, w);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) m.at(y, x) = 1;
    return m;
}

/// Random blob: union of a few random rectangles (always nonempty).
BinaryMask random_blob(int h, int w, Rng& rng) {
    BinaryMask m(h, w);
    const int n = rng.uniform_int(1, 3);
    for (int i = 0; i < n; ++i) {
        const int y0 = rng.uniform_int(0, h - 8), x0 = rng.uniform_int(0, w - 8);
        const int y1 = y0 + rng.uniform_int(4, 7), x1 = x0 + rng.uniform_int(4, 7);
        for (int y = y0; y <= std::min(h - 1, y1); ++y)
            for (int x = x0; x <= std::min(w - 1, x1); ++x) m.at(y, x) = 1;
    }
    return m;
}

bool subset_of(const BinaryMask& a, const BinaryMask& b) {
    for (size_t i = 0; i < a.values.size(); ++i)
        if (a.values[i] && !b.values[i]) return false;
    return true;
}

} // namespace

TEST_CASE("filled square: scribble stays inside and contains the center") {
    const BinaryMask square = filled_rect(31, 31, 5, 5, 25, 25); // 21x21 square
    ScribbleParams params;
    params.jitter_px = 0;
    params.rng_seed = 3;
    const ScribbleMap s = synthesize_scribble(square, params);
    CHECK(s.mask.count() >= 1);
    CHECK(subset_of(s.mask, square));
    // thinning of a square keeps its central pixel; peeling removes
    // endpoints only, so the center survives
    CHECK(s.mask.at(15, 15) == 1);
}

TEST_CASE("single-pixel mask gives a single-pixel scribble") {
    BinaryMask dot(16, 16);
    dot.at(7, 9) = 1;
    ScribbleParams params;
    params.jitter_px = 0;
    const ScribbleMap s = synthesize_scribble(dot, params);
    CHECK(s.mask.count() == 1);
    CHECK(s.mask.at(7, 9) == 1);
}

TEST_CASE("determinism under a fixed seed") {
    Rng rng(77);
    const BinaryMask blob = random_blob(48, 48, rng);
    ScribbleParams params;
    params.rng_seed = 42;
    params.jitter_px = 2;
    const ScribbleMap a = synthesize_scribble(blob, params);
    const ScribbleMap b = synthesize_scribble(blob, params);
    CHECK(a.mask.values == b.mask.values);
}

TEST_CASE("empty mask raises EmptyMask") {
    BinaryMask empty(8, 8);
    CHECK_THROWS_AS(synthesize_scribble(empty, ScribbleParams{}), EmptyMask);
}

TEST_CASE("property: jitter 0 keeps scribbles inside the mask") {
    Rng rng(123);
    ScribbleParams params;
    params.jitter_px = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const BinaryMask blob = random_blob(40, 40, rng);
        params.rng_seed = rng.next_u64();
        const ScribbleMap s = synthesize_scribble(blob, params);
        CHECK(s.mask.count() >= 1);
        CHECK(subset_of(s.mask, blob));
    }
}

TEST_CASE("property: sparsity below 0.2x for masks of >= 100 pixels") {
    Rng rng(321);
    ScribbleParams params;
    for (int trial = 0; trial < 50; ++trial) {
        BinaryMask blob = random_blob(64, 64, rng);
        while (blob.count() < 100) blob = random_blob(64, 64, rng);
        params.rng_seed = rng.next_u64();
        const ScribbleMap s = synthesize_scribble(blob, params);
        CHECK(static_cast<double>(s.mask.count()) < 0.2 * static_cast<double>(blob.count()));
    }
}

TEST_CASE("background scribble avoids every object") {
    const BinaryMask square = filled_rect(64, 64, 20, 20, 44, 44);
    ScribbleParams params;
    params.jitter_px = 0;
    params.rng_seed = 9;
    const ScribbleMap bg = synthesize_background_scribble({square}, params);
    CHECK(bg.object_id == 0);
    CHECK(bg.mask.count() >= 1);
    for (size_t i = 0; i < bg.mask.values.size(); ++i)
        CHECK((bg.mask.values[i] & square.values[i]) == 0);
}

TEST_CASE("full coverage leaves no room for a background scribble") {
    const BinaryMask all = filled_rect(16, 16, 0, 0, 15, 15);
    CHECK_THROWS_AS(synthesize_background_scribble({all}, ScribbleParams{}), EmptyMask);
}

TEST_CASE("background scribble is deterministic") {
    const BinaryMask square = filled_rect(32, 32, 4, 4, 12, 12);
    ScribbleParams params;
    params.rng_seed = 11;
    const ScribbleMap a = synthesize_background_scribble({square}, params);
    const ScribbleMap b = synthesize_background_scribble({square}, params);
    CHECK(a.mask.values == b.mask.values);
}

TEST_CASE("validate_scribble reports emptiness, extent, and components") {
    ScribbleMap empty;
    empty.mask = BinaryMask(16, 16);
    const ScribbleReport r0 = validate_scribble(empty, 16, 16);
    CHECK(r0.empty);
    CHECK(r0.components == 0);

    // two disjoint strokes
    ScribbleMap two;
    two.mask = BinaryMask(16, 16);
    for (int x = 1; x < 5; ++x) two.mask.at(2, x) = 1;
    for (int x = 8; x < 12; ++x) two.mask.at(10, x) = 1;
    const ScribbleReport r2 = validate_scribble(two, 16, 16);
    CHECK_FALSE(r2.empty);
    CHECK(r2.components == 2);
    CHECK(r2.pixel_count == 8);
    CHECK(r2.min_y == 2);
    CHECK(r2.max_y == 10);

    // single stroke
    ScribbleMap one;
    one.mask = BinaryMask(16, 16);
    for (int x = 3; x < 9; ++x) one.mask.at(5, x) = 1;
    const ScribbleReport r1 = validate_scribble(one, 16, 16);
    CHECK_FALSE(r1.empty);
    CHECK(r1.components == 1);
    CHECK(r1.in_bounds);
    CHECK_FALSE(validate_scribble(one, 32, 32).in_bounds);
}

TEST_CASE("thinning a thick line yields a thin connected stroke") {
    const BinaryMask bar = filled_rect(20, 40, 8, 2, 12, 37); // 5px-thick bar
    const BinaryMask skel = thin_mask(bar);
    CHECK(skel.count() >= 30);
    CHECK(skel.count() <= 80);
    CHECK(connected_components(skel) == 1);
    CHECK(subset_of(skel, bar));
}
