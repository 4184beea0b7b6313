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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "proxykit/calibration.hpp"
#include "proxykit/enhancer.hpp"
#include "proxykit/gaze.hpp"
#include "proxykit/pipeline.hpp"
#include "proxykit/reference.hpp"

namespace proxykit {

using Json = nlohmann::json;

// All parsers throw Error(kParse) on malformed input.
Json ParseJson(std::string_view text);
Json LoadJson(const std::filesystem::path& path);

std::string Base64Encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> Base64Decode(std::string_view text);

// Parameter files hold the nine EnhancementParams fields. Missing fields
// keep their value from `base`; unknown fields are rejected.
Json ToJson(const EnhancementParams& p);
EnhancementParams ParamsFromJson(const Json& j, const EnhancementParams& base = {});
EnhancementParams LoadParams(const std::filesystem::path& path);

Json ToJson(const LabColor& c);  // [L, a, b]
LabColor LabFromJson(const Json& j);

// {"centroids": [[L,a,b], ...], "weights": [...]}
Json ToJson(const Palette& p);
Palette PaletteFromJson(const Json& j);

Json ToJson(const PaletteDistances& d);

// {"id", "bbox": [x,y,w,h], "mask": {"size": [h,w], "counts": [...]},
//  "label"}. Numeric ids are accepted and stringified.
Json ToJson(const Detection& d);
Detection DetectionFromJson(const Json& j);
Json DetectionsToJson(const std::vector<Detection>& detections);
std::vector<Detection> DetectionsFromJson(const Json& j);

Json ToJson(const SkipDecision& d);
Json ToJson(const ProxyResult& r);
Json ToJson(const ReferenceChoice& c);
Json ToJson(const StageTimings& t);
Json ToJson(const PipelineResult& r);

Json ToJson(const gaze::GazeEvent& e);
Json ToJson(const gaze::PeripheralityReport& r);

// {"name", "default", "min", "max"}
Json ToJson(const calibration::ParamSpec& s);
std::vector<calibration::ParamSpec> SpecsFromJson(const Json& j);

// One {"t": ms, "yaw": deg, "pitch": deg, "hit": id?} object per line;
// blank lines are skipped.
std::vector<gaze::GazeSample> ParseGazeJsonl(std::string_view text);

}  // namespace proxykit
