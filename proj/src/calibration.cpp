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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "proxykit/error.hpp"

namespace proxykit::calibration {
namespace {

struct FieldRef {
  const char* name;
  double EnhancementParams::*field;
};

constexpr FieldRef kFields[] = {
    {"max_luminance", &EnhancementParams::max_luminance},
    {"max_sat_boost", &EnhancementParams::max_sat_boost},
    {"ab_push", &EnhancementParams::ab_push},
    {"skip_delta_e", &EnhancementParams::skip_delta_e},
    {"gamma", &EnhancementParams::gamma},
    {"clahe_clip", &EnhancementParams::clahe_clip},
    {"boost_saturation_distance", &EnhancementParams::boost_saturation_distance},
    {"boost_global_scale", &EnhancementParams::boost_global_scale},
};

const FieldRef* FindField(const std::string& name) {
  for (const auto& f : kFields) {
    if (name == f.name) return &f;
  }
  return nullptr;
}

bool SameValue(double a, double b) {
  return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(a));
}

// Shaded elliptical blob; pixels outside the ellipse are unmasked.
RasterRegion Blob(int size, Rgb8 base, std::uint64_t seed) {
  Raster raster(size, size, {128, 128, 128});
  Mask mask(size, size);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 5.0);
  const double c = size / 2.0;
  const double rx = size * 0.42, ry = size * 0.47;
  auto clip = [](double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  };
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double dx = (x + 0.5 - c) / rx, dy = (y + 0.5 - c) / ry;
      const double r2 = dx * dx + dy * dy;
      if (r2 > 1.0) continue;
      const double shade = 1.0 - 0.35 * r2;
      raster.set(x, y, {clip(base.r * shade + noise(rng)),
                        clip(base.g * shade + noise(rng)),
                        clip(base.b * shade + noise(rng))});
      mask.set(x, y, true);
    }
  }
  return {std::move(raster), std::move(mask)};
}

}  // namespace

std::vector<ParamSpec> DefaultSpecs() {
  return {{"max_luminance", 1.0, 1.0, 8.0},
          {"max_sat_boost", 1.0, 1.0, 16.0},
          {"ab_push", 0.0, 0.0, 60.0}};
}

void ValidateSpecs(const std::vector<ParamSpec>& specs) {
  if (specs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no parameters to calibrate");
  }
  std::set<std::string> seen;
  for (const auto& s : specs) {
    if (!FindField(s.name)) {
      throw Error(ErrorCode::kInvalidArgument, "unknown parameter '" + s.name + "'");
    }
    if (!seen.insert(s.name).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate parameter '" + s.name + "'");
    }
    if (!(s.min < s.max) || s.default_value < s.min || s.default_value > s.max) {
      throw Error(ErrorCode::kInvalidArgument,
                  "parameter '" + s.name + "' needs min <= default <= max, min < max");
    }
  }
}

void SetParam(EnhancementParams& params, const std::string& name, double value) {
  const FieldRef* f = FindField(name);
  if (!f) throw Error(ErrorCode::kInvalidArgument, "unknown parameter '" + name + "'");
  params.*(f->field) = value;
}

double OppositeBound(const ParamSpec& spec) {
  return spec.default_value <= (spec.min + spec.max) / 2.0 ? spec.max : spec.min;
}

Session::Session(std::vector<ParamSpec> specs, int comparisons_per_param)
    : specs_(std::move(specs)), per_param_(comparisons_per_param) {
  ValidateSpecs(specs_);
  if (per_param_ < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one comparison per parameter");
  }
  for (const auto& s : specs_) states_.push_back({s.default_value, {}, 0, {}});
}

Comparison Session::Next() const {
  if (done()) throw Error(ErrorCode::kSessionComplete, "all parameters are fixed");
  const ParamState& st = states_[current_];
  Comparison c;
  c.param_index = current_;
  c.param = specs_[current_].name;
  c.comparison_index = st.comparisons_done;
  c.option_a = st.baseline;
  c.option_b = st.bound ? (st.baseline + *st.bound) / 2.0
                        : OppositeBound(specs_[current_]);
  return c;
}

void Session::Submit(double chosen) {
  const Comparison c = Next();
  double rejected;
  if (SameValue(chosen, c.option_a)) {
    chosen = c.option_a;
    rejected = c.option_b;
  } else if (SameValue(chosen, c.option_b)) {
    chosen = c.option_b;
    rejected = c.option_a;
  } else {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%g is not one of the offered values {%g, %g}",
                  chosen, c.option_a, c.option_b);
    throw Error(ErrorCode::kInvalidChoice, buf);
  }
  transcript_.push_back({c.param, c.comparison_index, c.option_a, c.option_b, chosen});
  ParamState& st = states_[current_];
  st.baseline = chosen;
  st.bound = rejected;
  if (++st.comparisons_done == per_param_) {
    st.fixed = st.baseline;
    ++current_;
  }
}

EnhancementParams Session::CurrentParams(const EnhancementParams& base) const {
  EnhancementParams p = base;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const double v = states_[i].fixed ? *states_[i].fixed
                     : i == current_ ? states_[i].baseline
                                     : specs_[i].default_value;
    SetParam(p, specs_[i].name, v);
  }
  return p;
}

double Aggregate(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "no values to aggregate");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "quantile must be in [0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double h = (values.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - lo) * (values[hi] - values[lo]);
}

Stimulus MakeStimulus(const RasterRegion& target, const RasterRegion& reference,
                      std::uint64_t seed) {
  QuantizeOptions opts;
  opts.seed = seed;
  return {Quantize(target, opts), Quantize(reference, opts)};
}

Stimulus BuiltinStimulus() {
  return MakeStimulus(Blob(64, {168, 200, 72}, 1), Blob(64, {92, 150, 48}, 2));
}

RenderedPair RenderComparison(const Session& session, const Stimulus& stimulus,
                              const EnhancementParams& base) {
  RenderedPair out;
  out.comparison = session.Next();
  EnhancementParams params = session.CurrentParams(base);
  SetParam(params, out.comparison.param, out.comparison.option_a);
  out.proxy_a = GenerateProxy(stimulus.target, stimulus.reference, params).proxy;
  SetParam(params, out.comparison.param, out.comparison.option_b);
  out.proxy_b = GenerateProxy(stimulus.target, stimulus.reference, params).proxy;
  return out;
}

const std::vector<ColorGroupPreset>& ColorGroupPresets() {
  static const std::vector<ColorGroupPreset> presets = {
      {"green", 2.00, 6.875, 15.00},
      {"yellow", 3.00, 10.50, 38.00},
      {"red", 3.00, 10.50, 28.75},
      {"blue", 3.00, 6.500, 38.00},
  };
  return presets;
}

std::string SessionStore::Create(std::vector<ParamSpec> specs, Stimulus stimulus,
                                 const EnhancementParams& base,
                                 int comparisons_per_param) {
  Session session(std::move(specs), comparisons_per_param);
  auto entry = std::shared_ptr<Entry>(
      new Entry{{}, std::move(session), std::move(stimulus), base});
  std::lock_guard lock(mu_);
  char id[24];
  std::snprintf(id, sizeof id, "s%06llu", static_cast<unsigned long long>(next_id_++));
  sessions_.emplace(id, std::move(entry));
  return id;
}

std::shared_ptr<SessionStore::Entry> SessionStore::Get(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    throw Error(ErrorCode::kUnknownSession, "unknown session '" + id + "'");
  }
  return it->second;
}

}  // namespace proxykit::calibration
