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

#include "proxykit/gaze.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "proxykit/error.hpp"

using namespace proxykit::gaze;

namespace {

constexpr double kStepMs = 4.0;  // 250 Hz

// Builds sampled traces segment by segment and records, per sample, whether
// the interval it owns belongs to a saccade.
class TraceBuilder {
 public:
  explicit TraceBuilder(Angles start, double jitter = 0.0, std::uint64_t seed = 1,
                        double step_ms = kStepMs)
      : pos_(start), step_(step_ms), rng_(seed), noise_(0.0, jitter > 0 ? jitter : 1.0),
        jitter_(jitter > 0) {}

  TraceBuilder& Fixate(double ms) {
    for (int i = 0; i < static_cast<int>(std::lround(ms / step_)); ++i)
      Push(pos_, false);
    return *this;
  }
  TraceBuilder& Saccade(double ms, Angles to) {
    const int n = static_cast<int>(std::lround(ms / step_));
    for (int i = 0; i < n; ++i) {
      const double f = static_cast<double>(i) / n;
      Push({pos_.yaw + (to.yaw - pos_.yaw) * f,
            pos_.pitch + (to.pitch - pos_.pitch) * f},
           true);
    }
    pos_ = to;
    return *this;
  }
  // Closing sample that bounds the last owned interval.
  std::vector<GazeSample> Finish() {
    Push(pos_, false);
    return samples_;
  }
  const std::vector<bool>& truth() const { return truth_; }

 private:
  void Push(Angles a, bool saccade) {
    if (jitter_) {
      a.yaw += noise_(rng_);
      a.pitch += noise_(rng_);
    }
    samples_.push_back({t_, a, std::nullopt});
    truth_.push_back(saccade);
    t_ += step_;
  }

  Angles pos_;
  double step_;
  double t_ = 0.0;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_;
  bool jitter_;
  std::vector<GazeSample> samples_;
  std::vector<bool> truth_;
};

const DisplayRect kDisplay{{0.0, 0.0}, 20.0, 15.0};
const Angles kWorld{40.0, 0.0};
const Angles kScreen{0.0, 0.0};

}  // namespace

TEST_CASE("fixation, saccade, fixation trace") {
  const auto trace = TraceBuilder({0, 0}).Fixate(200).Saccade(20, {15, 0}).Fixate(200).Finish();
  const auto events = Classify(trace);
  REQUIRE(events.size() == 3);
  CHECK(events[0].kind == EventKind::kFixation);
  CHECK(events[0].duration() == doctest::Approx(200));
  CHECK(events[1].kind == EventKind::kSaccade);
  CHECK(events[1].duration() == doctest::Approx(20));
  CHECK(events[2].kind == EventKind::kFixation);
  CHECK(events[2].duration() == doctest::Approx(200));
  CHECK(events[2].centroid->yaw == doctest::Approx(15));
}

TEST_CASE("stationary segment shorter than the minimum is not a fixation") {
  const auto trace = TraceBuilder({0, 0}).Fixate(40).Finish();
  CHECK(Classify(trace).empty());
  const auto longer = TraceBuilder({0, 0}).Fixate(52).Finish();
  CHECK(Classify(longer).size() == 1);
}

TEST_CASE("long saccade runs stay unclassified") {
  const auto trace = TraceBuilder({0, 0}).Fixate(100).Saccade(60, {30, 0}).Fixate(100).Finish();
  const auto events = Classify(trace);
  REQUIRE(events.size() == 2);
  CHECK(events[0].kind == EventKind::kFixation);
  CHECK(events[1].kind == EventKind::kFixation);
}

TEST_CASE("classifier input validation") {
  CHECK_THROWS_AS(Classify({}), proxykit::Error);
  std::vector<GazeSample> one{{0, {}, {}}};
  try {
    Classify(one);
    FAIL("expected throw");
  } catch (const proxykit::Error& e) {
    CHECK(e.code() == proxykit::ErrorCode::kTooFewSamples);
  }
  std::vector<GazeSample> backwards{{10, {}, {}}, {5, {}, {}}};
  CHECK_THROWS_AS(Classify(backwards), proxykit::Error);
}

TEST_CASE("jittered simulator agrees with ground truth") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> fix_steps(40, 100), sac_steps(4, 7);
  std::uniform_real_distribution<double> target(-25.0, 25.0);
  TraceBuilder builder({0, 0}, 0.02, 17);
  for (int i = 0; i < 60; ++i) {
    builder.Fixate(fix_steps(rng) * kStepMs);
    builder.Saccade(sac_steps(rng) * kStepMs, {target(rng), target(rng) * 0.5});
  }
  builder.Fixate(200);
  const auto trace = builder.Finish();
  const auto events = Classify(trace);

  std::vector<int> label(trace.size() - 1, -1);
  for (const auto& e : events)
    for (std::size_t i = e.first_sample; i <= e.last_sample; ++i)
      label[i] = e.kind == EventKind::kSaccade ? 1 : 0;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < label.size(); ++i)
    agree += label[i] == (builder.truth()[i] ? 1 : 0);
  const double rate = static_cast<double>(agree) / label.size();
  CHECK(rate >= 0.95);
}

TEST_CASE("ambient value anchors") {
  CHECK(AmbientValue({0, 0}, kDisplay) == 1.0);
  CHECK(AmbientValue({10, 7.5}, kDisplay) == 1.0);
  CHECK(AmbientValue({15, 0}, kDisplay) == doctest::Approx(0.5));
  CHECK(AmbientValue({0, -12.5}, kDisplay) == doctest::Approx(0.5));
  CHECK(AmbientValue({20, 0}, kDisplay) == 0.0);
  CHECK(AmbientValue({35, 0}, kDisplay) == 0.0);
  CHECK(ZoneOf({0, 0}, kDisplay) == Zone::kDisplay);
  CHECK(ZoneOf({15, 0}, kDisplay) == Zone::kTransition);
  CHECK(ZoneOf(kWorld, kDisplay) == Zone::kWorld);
}

TEST_CASE("world, display, world session") {
  const auto trace = TraceBuilder(kWorld)
                         .Fixate(2000)
                         .Saccade(20, kScreen)
                         .Fixate(1000)
                         .Saccade(20, kWorld)
                         .Fixate(2000)
                         .Finish();
  const auto r = Peripherality(Classify(trace), kDisplay);
  CHECK(r.t_world_s == doctest::Approx(4.0));
  CHECK(r.t_display_s == doctest::Approx(1.0));
  CHECK(r.transitions == 2);
  CHECK(*r.ratio() == doctest::Approx(4.0));
}

TEST_CASE("six-to-one session with seven transitions") {
  TraceBuilder b(kWorld, 0.0, 1, 2.0);  // 500 Hz so 250 ms is whole samples
  for (int i = 0; i < 4; ++i) {
    b.Fixate(1500).Saccade(20, kScreen).Fixate(250);
    if (i < 3) b.Saccade(20, kWorld);
  }
  const auto r = Peripherality(Classify(b.Finish()), kDisplay);
  CHECK(r.t_world_s == doctest::Approx(6.0));
  CHECK(r.t_display_s == doctest::Approx(1.0));
  CHECK(*r.ratio() == doctest::Approx(6.0));
  CHECK(r.transitions == 7);
}

TEST_CASE("peripherality partitions the session time") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> fix_steps(10, 120), sac_steps(3, 12);
  std::uniform_real_distribution<double> target(-40.0, 40.0);
  for (int trial = 0; trial < 20; ++trial) {
    TraceBuilder b({0, 0}, 0.02, trial);
    for (int i = 0; i < 30; ++i)
      b.Fixate(fix_steps(rng) * kStepMs).Saccade(sac_steps(rng) * kStepMs,
                                                 {target(rng), target(rng) * 0.4});
    const auto trace = b.Finish();
    const double total = (trace.back().t - trace.front().t) / 1000.0;
    const auto r = Peripherality(Classify(trace), kDisplay, total);
    const double classified =
        r.t_world_s + r.t_display_s + r.t_transition_zone_s + r.t_saccade_s;
    CHECK(classified <= total + 1e-9);
    CHECK(r.total_s == total);
    CHECK(r.t_world_s >= 0);
    CHECK(r.t_display_s >= 0);
  }
  PeripheralityReport empty;
  CHECK_FALSE(empty.ratio().has_value());
}

TEST_CASE("flashlight selects the nearest object inside the cone") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> yaw(-60, 60), pitch(-30, 30);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<SceneObject> objects;
    for (int i = 0; i < 12; ++i)
      objects.push_back({"o" + std::to_string(i), {yaw(rng), pitch(rng)}});
    const Angles dir{yaw(rng), pitch(rng)};
    const double cone = 10.0;
    std::optional<std::string> want;
    double best = 1e300;
    for (const auto& o : objects) {
      // Independent great-circle distance via the haversine formula.
      const double d2r = 3.14159265358979323846 / 180.0;
      const double p1 = dir.pitch * d2r, p2 = o.position.pitch * d2r;
      const double dl = (o.position.yaw - dir.yaw) * d2r;
      const double h = std::sin((p2 - p1) / 2) * std::sin((p2 - p1) / 2) +
                       std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
      const double d = 2 * std::asin(std::sqrt(h)) / d2r;
      if (d <= cone && d < best) {
        best = d;
        want = o.id;
      }
    }
    CHECK(FlashlightSelect(dir, objects, cone) == want);
  }
  CHECK(FlashlightSelect({0, 0}, {{"b", {1, 0}}, {"a", {-1, 0}}}, 5) == "a");
  CHECK_FALSE(FlashlightSelect({0, 0}, {{"a", {30, 0}}}, 5).has_value());
}
