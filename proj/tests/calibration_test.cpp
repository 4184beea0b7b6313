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

#include "proxykit/calibration.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "oracles.hpp"
#include "proxykit/colorspace.hpp"
#include "proxykit/error.hpp"
#include "proxykit/json_io.hpp"
#include "proxykit/server.hpp"

using namespace proxykit;
using namespace proxykit::calibration;

namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInvalidArgument;
}

// Hand simulation of the search for one parameter.
double SimulateOne(const ParamSpec& spec, const std::function<bool(double, double)>& prefer_b,
                   std::vector<std::pair<double, double>>* pairs = nullptr) {
  double baseline = spec.default_value;
  double other = spec.default_value <= (spec.min + spec.max) / 2 ? spec.max : spec.min;
  for (int i = 0; i < 3; ++i) {
    if (pairs) pairs->push_back({baseline, other});
    const bool take_b = prefer_b(baseline, other);
    const double rejected = take_b ? baseline : other;
    baseline = take_b ? other : baseline;
    other = (baseline + rejected) / 2;
  }
  return baseline;
}

double MaskedMeanL(const RasterRegion& r) {
  double sum = 0;
  std::size_t n = 0;
  for (int y = 0; y < r.height(); ++y)
    for (int x = 0; x < r.width(); ++x)
      if (r.mask.at(x, y)) {
        sum += Rgb8ToLab(r.raster.at(x, y)).L;
        ++n;
      }
  return sum / n;
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("opposite bound follows the default's side of the range") {
  CHECK(OppositeBound({"max_luminance", 1, 1, 8}) == 8);
  CHECK(OppositeBound({"ab_push", 60, 0, 60}) == 0);
  CHECK(OppositeBound({"ab_push", 30, 0, 60}) == 60);
}

TEST_CASE("always-larger chooser on max_luminance") {
  Session s({{"max_luminance", 1, 1, 8}});
  const double expected_b[] = {8, 4.5, 6.25};
  for (int i = 0; i < 3; ++i) {
    const auto c = s.Next();
    CHECK(c.comparison_index == i);
    CHECK(std::max(c.option_a, c.option_b) == 8);
    CHECK(std::min(c.option_a, c.option_b) == doctest::Approx(i == 0 ? 1 : expected_b[i]));
    s.Submit(std::max(c.option_a, c.option_b));
  }
  CHECK(s.done());
  CHECK(s.states()[0].fixed == 8.0);
  CHECK(CodeOf([&] { s.Next(); }) == ErrorCode::kSessionComplete);
  CHECK(CodeOf([&] { s.Submit(8); }) == ErrorCode::kSessionComplete);
}

TEST_CASE("always-baseline chooser keeps the default") {
  Session s(DefaultSpecs());
  while (!s.done()) s.Submit(s.Next().option_a);
  for (std::size_t i = 0; i < s.specs().size(); ++i)
    CHECK(*s.states()[i].fixed == s.specs()[i].default_value);
  CHECK(s.transcript().size() == 9);
}

TEST_CASE("choices outside the offered pair are rejected") {
  Session s(DefaultSpecs());
  CHECK(CodeOf([&] { s.Submit(3.0); }) == ErrorCode::kInvalidChoice);
  s.Submit(1.0);
  CHECK(s.transcript().size() == 1);
  CHECK(s.states()[0].baseline == 1.0);
}

TEST_CASE("transcript replay matches a hand simulation") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<bool> coin(9);
    for (std::size_t i = 0; i < coin.size(); ++i) coin[i] = rng() & 1;
    Session s(DefaultSpecs());
    std::size_t step = 0;
    while (!s.done()) {
      const auto c = s.Next();
      s.Submit(coin[step++] ? c.option_b : c.option_a);
    }
    for (std::size_t p = 0; p < 3; ++p) {
      std::size_t local = p * 3;
      const double want = SimulateOne(s.specs()[p], [&](double, double) { return coin[local++]; });
      CHECK(*s.states()[p].fixed == doctest::Approx(want));
    }
  }
}

TEST_CASE("simulated chooser over random hidden optima") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto specs = DefaultSpecs();
    std::vector<double> optimum;
    for (const auto& sp : specs)
      optimum.push_back(std::uniform_real_distribution<double>(sp.min, sp.max)(rng));
    Session s(specs);
    std::vector<int> per_param(3, 0);
    std::vector<double> widths;
    while (!s.done()) {
      const auto c = s.Next();
      const double v = optimum[c.param_index];
      ++per_param[c.param_index];
      const double width = std::fabs(c.option_b - c.option_a);
      if (c.comparison_index > 0) CHECK(width <= widths.back() / 2 + 1e-12);
      widths.push_back(width);
      s.Submit(std::fabs(c.option_b - v) < std::fabs(c.option_a - v) ? c.option_b
                                                                      : c.option_a);
      if (c.comparison_index == 2) widths.clear();
    }
    for (int n : per_param) CHECK(n == 3);
    for (std::size_t p = 0; p < 3; ++p) {
      const double range = specs[p].max - specs[p].min;
      CHECK(std::fabs(*s.states()[p].fixed - optimum[p]) <= range / 4);
    }
  }
}

TEST_CASE("current params isolate the parameter under test") {
  Session s(DefaultSpecs());
  s.Submit(8);
  s.Submit(8);
  s.Submit(8);
  s.Submit(16);
  const EnhancementParams p = s.CurrentParams({});
  CHECK(p.max_luminance == 8);
  CHECK(p.max_sat_boost == 16);
  CHECK(p.ab_push == 0);
  CHECK(p.gamma == EnhancementParams{}.gamma);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(Session({}), Error);
  CHECK_THROWS_AS(Session({{"nonsense", 1, 0, 2}}), Error);
  CHECK_THROWS_AS(Session({{"ab_push", 70, 0, 60}}), Error);
  CHECK_THROWS_AS(Session({{"ab_push", 0, 0, 60}, {"ab_push", 0, 0, 60}}), Error);
}

TEST_CASE("type-7 aggregation") {
  CHECK(Aggregate({5}, 0.0) == 5);
  CHECK(Aggregate({5}, 0.75) == 5);
  CHECK(Aggregate({1, 2, 3, 4}, 0.5) == 2.5);
  // Sorted {1,1,2,3,4,5,6,9}: h = 7 * 0.75 = 5.25 -> 5 + 0.25 * (6 - 5).
  CHECK(Aggregate({3, 1, 4, 1, 5, 9, 2, 6}, 0.75) == doctest::Approx(5.25));
  CHECK(CodeOf([] { Aggregate({}, 0.5); }) == ErrorCode::kEmptyInput);
  CHECK_THROWS_AS(Aggregate({1}, 1.5), Error);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> val(0, 10), prob(0, 1);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> v(1 + rng() % 12);
    for (auto& x : v) x = val(rng);
    const double p = prob(rng);
    const double q = Aggregate(v, p);
    CHECK(q == doctest::Approx(oracle::Quantile7(v, p)));
    v[rng() % v.size()] += val(rng);
    CHECK(Aggregate(v, p) >= q - 1e-12);
  }
}

TEST_CASE("rendered pair differs only in the parameter under test") {
  Session s(DefaultSpecs());
  const Stimulus stim = BuiltinStimulus();
  const auto pair = RenderComparison(s, stim, {});
  CHECK(pair.comparison.option_a == 1);
  CHECK(pair.comparison.option_b == 8);
  CHECK(MaskedMeanL(pair.proxy_b) > MaskedMeanL(pair.proxy_a));
}

TEST_CASE("shipped presets") {
  const EnhancementParams defaults;
  CHECK(defaults.max_luminance == 2.125);
  CHECK(defaults.max_sat_boost == 9.75);
  CHECK(defaults.ab_push == 30.0);
  CHECK(LoadParams(PROXYKIT_SOURCE_DIR "/presets/default.json") == defaults);

  const Json groups = LoadJson(PROXYKIT_SOURCE_DIR "/presets/color_groups.json");
  REQUIRE(groups["groups"].size() == ColorGroupPresets().size());
  for (const auto& g : ColorGroupPresets()) {
    const Json& row = groups["groups"][g.group];
    CHECK(row["max_luminance"].get<double>() == g.max_luminance);
    CHECK(row["max_sat_boost"].get<double>() == g.max_sat_boost);
    CHECK(row["ab_push"].get<double>() == g.ab_push);
  }
  const std::string text = ReadText(PROXYKIT_SOURCE_DIR "/presets/color_groups.json");
  CHECK(text.find(R"("green": {"max_luminance": 2.00, "max_sat_boost": 6.875, "ab_push": 15.00})") !=
        std::string::npos);
  CHECK(text.find(R"("blue": {"max_luminance": 3.00, "max_sat_boost": 6.500, "ab_push": 38.00})") !=
        std::string::npos);
}

TEST_CASE("session store serializes and isolates sessions") {
  SessionStore store;
  const auto a = store.Create(DefaultSpecs(), BuiltinStimulus(), {});
  const auto b = store.Create(DefaultSpecs(), BuiltinStimulus(), {});
  CHECK(a != b);
  store.Get(a)->session.Submit(8);
  CHECK(store.Get(b)->session.transcript().empty());
  CHECK(CodeOf([&] { store.Get("nope"); }) == ErrorCode::kUnknownSession);
}

TEST_CASE("calibration HTTP session walk") {
  CalibrationService service(CalibrationServiceConfig{});
  const int port = service.Bind("127.0.0.1", 0);
  std::thread th([&] { service.Run(); });
  service.WaitUntilReady();
  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(30, 0);

  auto res = cli.Post("/session", "{}", "application/json");
  REQUIRE(res);
  REQUIRE(res->status == 201);
  const std::string id = ParseJson(res->body)["id"];
  const std::string base = "/session/" + id;

  res = cli.Get(base + "/result");
  REQUIRE(res);
  CHECK(ParseJson(res->body)["complete"] == false);

  res = cli.Get(base + "/comparison");
  REQUIRE(res);
  REQUIRE(res->status == 200);
  Json cmp = ParseJson(res->body);
  CHECK(cmp["param"] == "max_luminance");
  CHECK(cmp["option_a"] == 1.0);
  CHECK(cmp["option_b"] == 8.0);
  const auto a = DecodePng(Base64Decode(cmp["proxy_a"].get<std::string>()));
  const auto b = DecodePng(Base64Decode(cmp["proxy_b"].get<std::string>()));
  CHECK(MaskedMeanL({b.raster, *b.alpha}) > MaskedMeanL({a.raster, *a.alpha}));

  // Value outside the pair, then a stale comparison index.
  res = cli.Post(base + "/choice",
                 R"({"param":"max_luminance","comparison_index":0,"chosen":3})",
                 "application/json");
  REQUIRE(res);
  CHECK(res->status == 422);
  res = cli.Post(base + "/choice",
                 R"({"param":"max_luminance","comparison_index":1,"chosen":8})",
                 "application/json");
  REQUIRE(res);
  CHECK(res->status == 409);

  // Concurrent double submission: exactly one is accepted.
  std::vector<int> statuses(6, 0);
  std::vector<std::thread> clients;
  for (int i = 0; i < 6; ++i) {
    clients.emplace_back([&, i] {
      httplib::Client c("127.0.0.1", port);
      auto r = c.Post(base + "/choice",
                      R"({"param":"max_luminance","comparison_index":0,"option":"b"})",
                      "application/json");
      statuses[i] = r ? r->status : -1;
    });
  }
  for (auto& t : clients) t.join();
  CHECK(std::count(statuses.begin(), statuses.end(), 200) == 1);
  CHECK(std::count(statuses.begin(), statuses.end(), 409) == 5);

  // Finish the walk always picking the larger value.
  for (int step = 1; step < 9; ++step) {
    res = cli.Get(base + "/comparison");
    REQUIRE(res);
    REQUIRE(res->status == 200);
    cmp = ParseJson(res->body);
    Json choice{{"param", cmp["param"]},
                {"comparison_index", cmp["comparison_index"]},
                {"chosen", std::max(cmp["option_a"].get<double>(),
                                    cmp["option_b"].get<double>())}};
    res = cli.Post(base + "/choice", choice.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
  }
  res = cli.Get(base + "/result");
  REQUIRE(res);
  const Json result = ParseJson(res->body);
  CHECK(result["complete"] == true);
  CHECK(result["values"]["max_luminance"] == 8.0);
  CHECK(result["values"]["max_sat_boost"] == 16.0);
  CHECK(result["values"]["ab_push"] == 60.0);
  CHECK(result["transcript"].size() == 9);

  res = cli.Get(base + "/comparison");
  REQUIRE(res);
  CHECK(res->status == 409);
  res = cli.Get("/session/unknown/result");
  REQUIRE(res);
  CHECK(res->status == 404);

  service.Stop();
  th.join();
}
