/* Copyright 2026 The proxykit Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "proxykit/reference.hpp"

#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "proxykit/error.hpp"
#include "textures.hpp"

using namespace proxykit;

namespace {

Detection Box(std::string id, Rect bbox, bool filled = true) {
  return {std::move(id), bbox, Mask(bbox.w, bbox.h, filled), std::nullopt};
}

// Frame with one painted rectangle per detection, colored with small noise.
struct Scene {
  Raster frame;
  std::vector<Detection> detections;
};

Scene RandomScene(std::mt19937_64& rng, int neighbors) {
  std::uniform_int_distribution<int> channel(0, 255);
  std::normal_distribution<double> noise(0.0, 4.0);
  Scene s;
  s.frame = Raster(160, 160, {30, 30, 30});
  auto paint = [&](const Detection& d) {
    const Rgb8 base{static_cast<std::uint8_t>(channel(rng)),
                    static_cast<std::uint8_t>(channel(rng)),
                    static_cast<std::uint8_t>(channel(rng))};
    for (int y = 0; y < d.bbox.h; ++y)
      for (int x = 0; x < d.bbox.w; ++x)
        s.frame.set(d.bbox.x + x, d.bbox.y + y,
                    {textures::Clip(base.r + noise(rng)),
                     textures::Clip(base.g + noise(rng)),
                     textures::Clip(base.b + noise(rng))});
  };
  s.detections.push_back(Box("target", {60, 60, 40, 40}));
  paint(s.detections[0]);
  // Neighbors sit in a ring around the target, each 12x12, no overlap.
  const Rect slots[] = {{40, 40, 12, 12},  {74, 40, 12, 12},  {108, 40, 12, 12},
                        {40, 74, 12, 12},  {108, 74, 12, 12}, {40, 108, 12, 12},
                        {74, 108, 12, 12}, {108, 108, 12, 12}, {56, 40, 12, 12},
                        {92, 40, 12, 12},  {40, 56, 12, 12},  {108, 56, 12, 12},
                        {40, 92, 12, 12},  {108, 92, 12, 12}, {56, 108, 12, 12}};
  for (int i = 0; i < neighbors; ++i) {
    s.detections.push_back(Box("n" + std::to_string(i), slots[i]));
    paint(s.detections.back());
  }
  return s;
}

bool Overlaps(double ax0, double ay0, double ax1, double ay1, const Rect& b) {
  return b.x < ax1 && ax0 < b.x + b.w && b.y < ay1 && ay0 < b.y + b.h;
}

}  // namespace

TEST_CASE("screenshot rect is a centered square clamped to the frame") {
  CHECK(ScreenshotRect(1000, 1000, {400, 400, 100, 50}) ==
        Rect{300, 275, 300, 300});
  CHECK(ScreenshotRect(200, 100, {0, 0, 40, 40}) == Rect{0, 0, 80, 80});
  CHECK(ScreenshotRect(100, 100, {80, 80, 20, 20}) == Rect{60, 60, 40, 40});
  CHECK(ScreenshotRect(100, 100, {10, 10, 20, 20}, 1.0) == Rect{10, 10, 20, 20});
}

TEST_CASE("screenshot reference excludes target mask pixels") {
  Raster frame(100, 100, {10, 20, 30});
  Detection target = Box("t", {40, 40, 10, 10}, false);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x)
      if ((x + y) % 2 == 0) target.mask.set(x, y, true);
  const RasterRegion region = ScreenshotReference(frame, target);
  CHECK(region.raster.width() == 30);
  CHECK(region.raster.height() == 30);
  CHECK(region.mask.count() == 30u * 30u - target.area());
  for (int y = 0; y < 30; ++y)
    for (int x = 0; x < 30; ++x)
      CHECK(region.mask.at(x, y) == !target.contains(30 + x, 30 + y));
}

TEST_CASE("neighbor search matches a brute-force overlap oracle") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pos(0, 180), size(1, 40);
  std::uniform_real_distribution<double> frac(0.0, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    const Detection target = Box("t", {pos(rng), pos(rng), size(rng), size(rng)});
    std::vector<Detection> all{target};
    for (int i = 0; i < 20; ++i)
      all.push_back(Box("d" + std::to_string(i),
                        {pos(rng), pos(rng), size(rng), size(rng)}));
    const double f = frac(rng);
    const auto got = FindNeighbors(all, target, Expansion::Fraction(f));
    std::vector<std::string> want;
    const double gx = f * target.bbox.w, gy = f * target.bbox.h;
    for (const auto& d : all) {
      if (d.id == target.id) continue;
      if (Overlaps(target.bbox.x - gx, target.bbox.y - gy,
                   target.bbox.x + target.bbox.w + gx,
                   target.bbox.y + target.bbox.h + gy, d.bbox))
        want.push_back(d.id);
    }
    std::vector<std::string> ids;
    for (const auto& d : got) ids.push_back(d.id);
    CHECK(ids == want);
  }
}

TEST_CASE("pixel expansion is symmetric and touching boxes do not overlap") {
  const Detection target = Box("t", {50, 50, 10, 10});
  std::vector<Detection> all{target, Box("left", {35, 50, 5, 5}),
                             Box("right", {70, 50, 5, 5}),
                             Box("far", {80, 50, 5, 5})};
  auto ids = [](const std::vector<Detection>& v) {
    std::vector<std::string> out;
    for (const auto& d : v) out.push_back(d.id);
    return out;
  };
  CHECK(ids(FindNeighbors(all, target, Expansion::Pixels(10))).empty());
  CHECK(ids(FindNeighbors(all, target, Expansion::Pixels(10.5))) ==
        std::vector<std::string>{"left", "right"});
  CHECK(ids(FindNeighbors(all, target, Expansion::Pixels(0))).empty());
}

TEST_CASE("msc picks the argmin palette-mean distance") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 14;
    Scene s = RandomScene(rng, n);
    const Detection& target = s.detections[0];
    const auto neighbors = FindNeighbors(s.detections, target);
    REQUIRE(neighbors.size() == static_cast<std::size_t>(n));

    const ReferenceChoice choice = MscReference(s.frame, target, neighbors);
    const Palette tp = Quantize(DetectionRegion(s.frame, target)).palette;
    const LabColor tm = PaletteMeanLab(tp);
    double best = 1e300;
    std::string best_id;
    for (const auto& d : neighbors) {
      const LabColor m = PaletteMeanLab(Quantize(DetectionRegion(s.frame, d)).palette);
      const double dist = oracle::Ciede2000({tm.L, tm.a, tm.b}, {m.L, m.a, m.b});
      if (dist < best || (dist == best && d.id < best_id)) {
        best = dist;
        best_id = d.id;
      }
    }
    CHECK(choice.source_id == best_id);
    CHECK(*choice.distance == doctest::Approx(best).epsilon(1e-9));
    CHECK(choice.candidates.size() == neighbors.size());
    REQUIRE(choice.quantized.has_value());
    CHECK(choice.region->raster.width() == 12);

    auto shuffled = neighbors;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(MscReference(s.frame, target, shuffled).source_id == choice.source_id);
  }
}

TEST_CASE("msc without neighbors throws NoNeighbors") {
  Raster frame(50, 50);
  const Detection target = Box("t", {10, 10, 10, 10});
  try {
    MscReference(frame, target, {});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoNeighbors);
  }
}

TEST_CASE("argmin ties go to the lower id") {
  CHECK(ArgminCandidate({{"b", 1.0}, {"a", 1.0}, {"c", 2.0}}) == 1);
  CHECK(ArgminCandidate({{"z", 0.5}, {"a", 1.0}}) == 0);
}

TEST_CASE("strategy names round-trip") {
  for (auto s : {ReferenceStrategy::kScreenshot, ReferenceStrategy::kMsc,
                 ReferenceStrategy::kBaselineNone})
    CHECK(ParseStrategy(StrategyName(s)) == s);
  CHECK(ParseStrategy("MSC") == ReferenceStrategy::kMsc);
  CHECK(ParseStrategy("none") == ReferenceStrategy::kBaselineNone);
  CHECK_THROWS_AS(ParseStrategy("nearest"), Error);
}

TEST_CASE("detection validation") {
  Raster frame(20, 20);
  Detection d = Box("d", {15, 15, 10, 10});
  CHECK_THROWS_AS(DetectionRegion(frame, d), Error);
  d.bbox = {0, 0, 5, 5};
  CHECK_THROWS_AS(DetectionRegion(frame, d), Error);
}

TEST_CASE("rle round-trips random masks") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> side(1, 40);
  std::bernoulli_distribution bit(0.3);
  for (int trial = 0; trial < 300; ++trial) {
    const int w = side(rng), h = side(rng);
    Mask m(w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) m.set(x, y, bit(rng));
    const auto counts = EncodeRle(m);
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    CHECK(total == static_cast<std::uint64_t>(w) * h);
    CHECK(DecodeRle(counts, w, h) == m);
  }
  CHECK(EncodeRle(Mask(3, 1, true)) == std::vector<std::uint32_t>{0, 3});
  CHECK_THROWS_AS(DecodeRle({2, 5}, 2, 2), Error);
  CHECK_THROWS_AS(DecodeRle({1, 1}, 2, 2), Error);
}
