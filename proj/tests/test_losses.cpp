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

#include <cmath>

#include "scribvos/losses.hpp"
#include "scribvos/rng.hpp"

#include "oracles.hpp"

using namespace scribvos;
using nn::Var;

namespace {

Var random_prob_map(int h, int w, Rng& rng, bool requires_grad = false) {
    std::vector<double> data(static_cast<size_t>(h) * w);
    for (auto& v : data) v = rng.uniform(0.02, 0.98);
    return Var::leaf({h, w}, std::move(data), requires_grad);
}

ScribbleMap random_scribble_map(int h, int w, Rng& rng, int object_id = 1) {
    ScribbleMap s;
    s.object_id = object_id;
    s.mask = BinaryMask(h, w);
    int y = rng.uniform_int(0, h - 1), x = rng.uniform_int(0, w - 1);
    for (int i = 0; i < h + w; ++i) {
        s.mask.at(y, x) = 1;
        y = std::clamp(y + rng.uniform_int(-1, 1), 0, h - 1);
        x = std::clamp(x + rng.uniform_int(-1, 1), 0, w - 1);
    }
    return s;
}

Image random_image(int h, int w, Rng& rng) {
    Image img(h, w);
    for (auto& v : img.data) v = rng.uniform(0.0, 1.0);
    return img;
}

/// Finite-difference check of one loss against its autodiff gradient.
void check_loss_gradient(const std::function<Var(const std::vector<Var>&)>& loss_fn,
                         std::vector<Var> maps, double rel_tol = 1e-4, double step = 1e-5) {
    for (auto& m : maps) m.zero_grad();
    Var loss = loss_fn(maps);
    nn::backward(loss);
    Rng pick(99);
    for (auto& m : maps) {
        REQUIRE(m.grad().size() == m.numel());
        for (int probe = 0; probe < 6; ++probe) {
            const size_t i = pick.next_u64() % m.numel();
            const double keep = m.value()[i];
            m.mutable_value()[i] = keep + step;
            const double up = loss_fn(maps).item();
            m.mutable_value()[i] = keep - step;
            const double down = loss_fn(maps).item();
            m.mutable_value()[i] = keep;
            const double numeric = (up - down) / (2 * step);
            const double denom = std::max({1e-8, std::abs(numeric), std::abs(m.grad()[i])});
            CHECK(std::abs(numeric - m.grad()[i]) / denom < rel_tol);
        }
    }
}

} // namespace

TEST_CASE("reliable-region targets partition the frame") {
    ScribbleMap s;
    s.mask = BinaryMask(9, 9);
    s.mask.at(4, 4) = 1;

    const ReliableRegionTarget r0 = reliable_region_targets(s, 0);
    int ignored = 0;
    for (const auto l : r0.labels) ignored += (l == ReliableLabel::ignore);
    CHECK(ignored == 0);

    const ReliableRegionTarget r1 = reliable_region_targets(s, 1);
    int pos = 0, neg = 0, ign = 0;
    for (const auto l : r1.labels) {
        pos += (l == ReliableLabel::positive);
        ign += (l == ReliableLabel::ignore);
        neg += (l == ReliableLabel::negative);
    }
    CHECK(pos == 1);
    CHECK(ign == 8); // the 8-connected band
    CHECK(pos + neg + ign == 81);

    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const ScribbleMap random = random_scribble_map(16, 16, rng);
        const ReliableRegionTarget t = reliable_region_targets(random, rng.uniform_int(0, 3));
        int total = 0;
        for (const auto l : t.labels)
            total += (l == ReliableLabel::positive || l == ReliableLabel::negative ||
                      l == ReliableLabel::ignore);
        CHECK(total == 256); // exactly three disjoint classes
    }
}

TEST_CASE("focal loss: closed-form single-pixel value") {
    // one positive pixel at p = 0.5 with gamma 2, alpha 0.25; every other
    // pixel ignored
    ScribbleMap s;
    s.mask = BinaryMask(4, 4);
    s.mask.at(1, 1) = 1;
    ReliableRegionTarget target = reliable_region_targets(s, 0);
    for (size_t i = 0; i < target.labels.size(); ++i)
        if (target.labels[i] == ReliableLabel::negative) target.labels[i] = ReliableLabel::ignore;

    const Var q = Var::full({4, 4}, 0.5);
    const Var loss = focal_loss_reliable({q}, {target}, 2.0, 0.25);
    CHECK(loss.item() == doctest::Approx(0.25 * 0.25 * std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("focal loss: perfect predictions drive the loss to zero") {
    Rng rng(7);
    const ScribbleMap s = random_scribble_map(8, 8, rng);
    const ReliableRegionTarget target = reliable_region_targets(s, 1);
    std::vector<double> q(64);
    for (int i = 0; i < 64; ++i)
        q[i] = target.labels[i] == ReliableLabel::positive ? 1.0 - 1e-9 : 1e-9;
    const Var loss = focal_loss_reliable({Var::leaf({8, 8}, q)}, {target}, 2.0, 0.25);
    CHECK(loss.item() < 1e-6);
}

TEST_CASE("focal loss ignores the ignored band") {
    Rng rng(9);
    const ScribbleMap s = random_scribble_map(8, 8, rng);
    const ReliableRegionTarget target = reliable_region_targets(s, 1);
    Var q1 = random_prob_map(8, 8, rng);
    std::vector<double> data = q1.value();
    for (int i = 0; i < 64; ++i)
        if (target.labels[i] == ReliableLabel::ignore) data[i] = rng.uniform(0.01, 0.99);
    const Var q2 = Var::leaf({8, 8}, data);
    const double a = focal_loss_reliable({q1}, {target}, 2.0, 0.25).item();
    const double b = focal_loss_reliable({q2}, {target}, 2.0, 0.25).item();
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("focal loss equals the naive oracle on random clips") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Var> maps;
        std::vector<ReliableRegionTarget> targets;
        std::vector<std::vector<double>> raw;
        for (int t = 0; t < 3; ++t) {
            maps.push_back(random_prob_map(8, 8, rng));
            raw.push_back(maps.back().value());
            targets.push_back(reliable_region_targets(random_scribble_map(8, 8, rng), 1));
        }
        const double expected = oracle::focal_loss(raw, targets, 8, 8, 2.0, 0.25);
        const double actual = focal_loss_reliable(maps, targets, 2.0, 0.25).item();
        CHECK(std::abs(expected - actual) < 1e-6);
    }
}

TEST_CASE("soft aggregation: fixtures and the odds formula") {
    // single object p = 0.5
    const Var half = Var::full({2, 2}, 0.5);
    const Var agg1 = soft_aggregate({half});
    CHECK(agg1.value()[0] == doctest::Approx(0.5).epsilon(1e-9));        // background
    CHECK(agg1.value()[4] == doctest::Approx(0.5).epsilon(1e-9));        // object

    // single object p = 0.8: odds 4 vs background odds 0.25
    const Var agg2 = soft_aggregate({Var::full({1, 1}, 0.8)});
    CHECK(agg2.value()[1] == doctest::Approx(4.0 / 4.25).epsilon(1e-9));
    CHECK(agg2.value()[0] == doctest::Approx(0.25 / 4.25).epsilon(1e-9));

    // two equal objects share the probability mass
    const Var agg3 = soft_aggregate({Var::full({1, 1}, 0.6), Var::full({1, 1}, 0.6)});
    CHECK(agg3.value()[1] == doctest::Approx(agg3.value()[2]).epsilon(1e-12));
}

TEST_CASE("soft aggregation: columns sum to one; object order is equivariant") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Var> maps{random_prob_map(4, 4, rng), random_prob_map(4, 4, rng),
                              random_prob_map(4, 4, rng)};
        const Var agg = soft_aggregate(maps);
        REQUIRE(agg.shape() == nn::Shape({4, 4, 4}));
        for (int px = 0; px < 16; ++px) {
            double total = 0.0;
            for (int k = 0; k < 4; ++k) total += agg.value()[k * 16 + px];
            CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
        }
        const Var swapped = soft_aggregate({maps[2], maps[0], maps[1]});
        for (int px = 0; px < 16; ++px) {
            CHECK(swapped.value()[0 * 16 + px] == doctest::Approx(agg.value()[0 * 16 + px]).epsilon(1e-12));
            CHECK(swapped.value()[1 * 16 + px] == doctest::Approx(agg.value()[3 * 16 + px]).epsilon(1e-12));
        }
        // oracle equality
        std::vector<std::vector<double>> raw{maps[0].value(), maps[1].value(), maps[2].value()};
        const auto expected = oracle::soft_aggregate(raw);
        for (size_t i = 0; i < expected.size(); ++i)
            CHECK(std::abs(expected[i] - agg.value()[i]) < 1e-6);
    }
}

TEST_CASE("pce loss: fixtures") {
    // probability 1 at the labeled pixel's identity: loss 0
    std::vector<Var> agg{soft_aggregate({Var::full({2, 2}, 1.0 - 1e-9)})};
    const Var zero = pce_loss(agg, {{{0, 0, 1}}});
    CHECK(zero.item() < 1e-6);

    // a labeled pixel whose true-class probability is e^{-1}: loss 1
    std::vector<double> dist{std::exp(-1.0), 1.0 - std::exp(-1.0), //
                             0.5, 0.5};
    const Var two_px = nn::reshape(Var::leaf({2, 2}, dist), {2, 1, 2});
    const Var one = pce_loss({two_px}, {{{0, 0, 0}}});
    CHECK(one.item() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pce loss: unlabeled pixels are free; bad identities rejected") {
    Rng rng(17);
    std::vector<Var> maps{random_prob_map(4, 4, rng), random_prob_map(4, 4, rng)};
    const std::vector<std::vector<LabeledPixel>> labels{{{0, 0, 1}, {1, 2, 0}, {3, 3, 2}}};
    const double base = pce_loss({soft_aggregate(maps)}, labels).item();

    // perturb an unlabeled pixel of the object maps
    std::vector<double> d0 = maps[0].value();
    d0[2 * 4 + 2] = 0.123;
    const double perturbed =
        pce_loss({soft_aggregate({Var::leaf({4, 4}, d0), maps[1]})}, labels).item();
    CHECK(base == doctest::Approx(perturbed).epsilon(1e-12));

    CHECK_THROWS_AS(pce_loss({soft_aggregate(maps)}, {{{0, 0, 5}}}), InvalidInput);
}

TEST_CASE("pce loss equals the naive oracle") {
    Rng rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<Var>> frames;
        std::vector<Var> aggregated;
        std::vector<std::vector<LabeledPixel>> labels;
        std::vector<std::vector<std::vector<double>>> raw;
        for (int t = 0; t < 3; ++t) {
            std::vector<Var> maps{random_prob_map(8, 8, rng), random_prob_map(8, 8, rng)};
            aggregated.push_back(soft_aggregate(maps));
            raw.push_back({maps[0].value(), maps[1].value()});
            std::vector<LabeledPixel> frame_labels;
            for (int i = 0; i < 6; ++i)
                frame_labels.push_back(
                    {rng.uniform_int(0, 7), rng.uniform_int(0, 7), rng.uniform_int(0, 2)});
            labels.push_back(frame_labels);
        }
        const double expected = oracle::pce_loss(raw, labels, 8, 8);
        const double actual = pce_loss(aggregated, labels).item();
        CHECK(std::abs(expected - actual) < 1e-6);
    }
}

TEST_CASE("smoothness loss: fixtures") {
    // constant map: zero
    const Image flat = [] {
        Image img(4, 4);
        img.data.assign(img.data.size(), 0.3);
        return img;
    }();
    CHECK(smoothness_loss({Var::full({4, 4}, 0.42)}, {flat}, 10.0).item() == 0.0);

    // 1x2 fixture: Q = [0, 1], uniform intensity, N'' = 2 -> 0.5
    Image tiny(1, 2);
    tiny.data.assign(tiny.data.size(), 0.5);
    const Var q = Var::leaf({1, 2}, {0.0, 1.0});
    CHECK(smoothness_loss({q}, {tiny}, 10.0).item() == doctest::Approx(0.5).epsilon(1e-12));

    // co-located intensity step of growing size: monotonically decreasing
    double last = 1e9;
    for (const double delta : {0.0, 0.1, 0.2, 0.4}) {
        Image stepped(1, 2);
        for (int c = 0; c < 3; ++c) {
            stepped.at(0, 0, c) = 0.5;
            stepped.at(0, 1, c) = 0.5 + delta;
        }
        const double v = smoothness_loss({q}, {stepped}, 10.0).item();
        CHECK(v == doctest::Approx(0.5 * std::exp(-10.0 * delta)).epsilon(1e-9));
        CHECK(v < last);
        last = v;
    }
}

TEST_CASE("smoothness loss: constant shift invariance and oracle equality") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const Image img = random_image(8, 8, rng);
        Var q = random_prob_map(8, 8, rng);
        const double base = smoothness_loss({q}, {img}, 10.0).item();
        std::vector<double> shifted = q.value();
        for (auto& v : shifted) v += 5.0; // derivative-based: unchanged
        const double moved =
            smoothness_loss({Var::leaf({8, 8}, shifted)}, {img}, 10.0).item();
        CHECK(base == doctest::Approx(moved).epsilon(1e-9));

        const double expected = oracle::smoothness_loss({q.value()}, {img}, 8, 8, 10.0);
        CHECK(std::abs(base - expected) < 1e-6);
    }
}

TEST_CASE("bpc loss: fixtures and oracle") {
    const Var a = Var::full({2, 2}, 0.4);
    CHECK(bpc_loss({a}, {a}).item() == 0.0);

    const Var q1 = Var::leaf({1, 1}, {1.0 - 1e-9});
    const Var b1 = Var::leaf({1, 1}, {1e-9});
    CHECK(bpc_loss({q1}, {b1}).item() == doctest::Approx(1.0).epsilon(1e-6));

    CHECK(bpc_loss({Var::leaf({1, 1}, {0.6})}, {Var::leaf({1, 1}, {0.1})}).item() ==
          doctest::Approx(0.25).epsilon(1e-12));

    CHECK_THROWS_AS(bpc_loss({a}, {a, a}), InvalidInput);

    Rng rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Var> fwd, bwd;
        std::vector<std::vector<double>> rf, rb;
        for (int t = 0; t < 3; ++t) {
            fwd.push_back(random_prob_map(8, 8, rng));
            bwd.push_back(random_prob_map(8, 8, rng));
            rf.push_back(fwd.back().value());
            rb.push_back(bwd.back().value());
        }
        const double expected = oracle::bpc_loss(rf, rb, 8, 8);
        CHECK(std::abs(bpc_loss(fwd, bwd).item() - expected) < 1e-6);
    }
}

TEST_CASE("total loss: weighted sum, annihilation, and error paths") {
    const Var one = Var::scalar(1.0);
    const TotalLoss t = total_loss(one, one, one, one, 1.0, 1.0, 0.3, 20.0);
    CHECK(t.values.total == doctest::Approx(22.3).epsilon(1e-12));

    const Var zero = Var::scalar(0.0);
    CHECK(total_loss(zero, zero, zero, zero, 1.0, 1.0, 0.3, 20.0).values.total == 0.0);

    // lambda4 = 0 removes the consistency term
    const Var bpc = Var::scalar(123.0);
    CHECK(total_loss(one, one, one, bpc, 1.0, 1.0, 0.3, 0.0).values.total ==
          doctest::Approx(2.3).epsilon(1e-12));

    // absent components contribute nothing
    CHECK(total_loss(one, one, one, Var(), 1.0, 1.0, 0.3, 20.0).values.total ==
          doctest::Approx(2.3).epsilon(1e-12));

    const Var nan_component = Var::scalar(std::nan(""));
    CHECK_THROWS_AS(total_loss(nan_component, one, one, one, 1, 1, 0.3, 20), NonFiniteLoss);
}

TEST_CASE("gradients of every loss match finite differences") {
    Rng rng(31);
    // focal
    {
        std::vector<ReliableRegionTarget> targets{
            reliable_region_targets(random_scribble_map(8, 8, rng), 1)};
        check_loss_gradient(
            [&targets](const std::vector<Var>& maps) {
                return focal_loss_reliable(maps, targets, 2.0, 0.25);
            },
            {random_prob_map(8, 8, rng, true)});
    }
    // pce through soft aggregation
    {
        std::vector<std::vector<LabeledPixel>> labels{{{1, 1, 1}, {4, 2, 0}, {6, 6, 2}}};
        check_loss_gradient(
            [&labels](const std::vector<Var>& maps) {
                return pce_loss({soft_aggregate(maps)}, labels);
            },
            {random_prob_map(8, 8, rng, true), random_prob_map(8, 8, rng, true)});
    }
    // smoothness
    {
        const Image img = random_image(8, 8, rng);
        check_loss_gradient(
            [&img](const std::vector<Var>& maps) {
                return smoothness_loss(maps, {img}, 10.0);
            },
            {random_prob_map(8, 8, rng, true)});
    }
    // bpc
    {
        check_loss_gradient(
            [](const std::vector<Var>& maps) {
                return bpc_loss({maps[0]}, {maps[1]});
            },
            {random_prob_map(8, 8, rng, true), random_prob_map(8, 8, rng, true)});
    }
}
