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

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "proxykit/enhancer.hpp"
#include "proxykit/quantizer.hpp"

namespace proxykit::calibration {

struct ParamSpec {
  std::string name;
  double default_value = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// max_luminance 1 in [1, 8], max_sat_boost 1 in [1, 16], ab_push 0 in [0, 60].
std::vector<ParamSpec> DefaultSpecs();

// Throws Error(kInvalidArgument) on an empty list, duplicate or unknown
// names, or min <= default <= max violations.
void ValidateSpecs(const std::vector<ParamSpec>& specs);

// Sets a numeric EnhancementParams field by name.
void SetParam(EnhancementParams& params, const std::string& name, double value);

// Max when the default sits at or below midrange, min otherwise.
double OppositeBound(const ParamSpec& spec);

inline constexpr int kComparisonsPerParam = 3;

struct Comparison {
  std::size_t param_index = 0;
  std::string param;
  int comparison_index = 0;  // 0-based within the parameter
  double option_a = 0.0;     // current baseline
  double option_b = 0.0;     // challenger
};

struct ChoiceRecord {
  std::string param;
  int comparison_index = 0;
  double option_a = 0.0;
  double option_b = 0.0;
  double chosen = 0.0;
};

struct ParamState {
  double baseline = 0.0;
  // Most recently rejected value; the search interval is [baseline, bound].
  std::optional<double> bound;
  int comparisons_done = 0;
  std::optional<double> fixed;
};

// Dichotomous search, one parameter at a time. The first comparison pits
// the default against the opposite bound; each later one pits the baseline
// against the midpoint of [baseline, last rejected value]. The preferred
// value becomes the baseline. After `comparisons_per_param` choices the
// parameter is fixed at its baseline.
class Session {
 public:
  explicit Session(std::vector<ParamSpec> specs,
                   int comparisons_per_param = kComparisonsPerParam);

  bool done() const { return current_ >= specs_.size(); }
  // Throws Error(kSessionComplete) once every parameter is fixed.
  Comparison Next() const;
  // Throws Error(kSessionComplete) or Error(kInvalidChoice) when `chosen`
  // is not one of the offered values.
  void Submit(double chosen);

  const std::vector<ParamSpec>& specs() const { return specs_; }
  const std::vector<ParamState>& states() const { return states_; }
  const std::vector<ChoiceRecord>& transcript() const { return transcript_; }
  int comparisons_per_param() const { return per_param_; }
  std::size_t current_param() const { return current_; }

  // `base` with fixed values for completed parameters, the baseline for the
  // parameter under test and defaults for the rest.
  EnhancementParams CurrentParams(const EnhancementParams& base) const;

 private:
  std::vector<ParamSpec> specs_;
  std::vector<ParamState> states_;
  std::vector<ChoiceRecord> transcript_;
  int per_param_;
  std::size_t current_ = 0;
};

// Linear-interpolation (type 7) quantile. Throws Error(kEmptyInput) for no
// values and Error(kInvalidArgument) for p outside [0, 1].
double Aggregate(std::vector<double> values, double p);

// Target/reference pair shown while calibrating, quantized once.
struct Stimulus {
  QuantizedRegion target;
  QuantizedRegion reference;
};

Stimulus MakeStimulus(const RasterRegion& target, const RasterRegion& reference,
                      std::uint64_t seed = kDefaultSeed);

// Procedural green pear (target) and green apple (reference).
Stimulus BuiltinStimulus();

struct RenderedPair {
  Comparison comparison;
  RasterRegion proxy_a;
  RasterRegion proxy_b;
};

// Proxies for both options of the current comparison; every other
// parameter comes from Session::CurrentParams(base).
RenderedPair RenderComparison(const Session& session, const Stimulus& stimulus,
                              const EnhancementParams& base);

struct ColorGroupPreset {
  std::string group;
  double max_luminance;
  double max_sat_boost;
  double ab_push;
};

// Per-color-group 75th percentiles shipped in presets/color_groups.json.
const std::vector<ColorGroupPreset>& ColorGroupPresets();

// Thread-safe registry; each session is guarded by its own mutex so
// concurrent submissions to one session are serialized.
class SessionStore {
 public:
  struct Entry {
    std::mutex mu;
    Session session;
    Stimulus stimulus;
    EnhancementParams base;
  };

  std::string Create(std::vector<ParamSpec> specs, Stimulus stimulus,
                     const EnhancementParams& base,
                     int comparisons_per_param = kComparisonsPerParam);
  // Throws Error(kUnknownSession).
  std::shared_ptr<Entry> Get(const std::string& id) const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t next_id_ = 1;
};

}  // namespace proxykit::calibration
