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

#include "proxykit/json_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "proxykit/error.hpp"

namespace proxykit {
namespace {

[[noreturn]] void ParseFail(const std::string& what) {
  throw Error(ErrorCode::kParse, what);
}

// Runs `fn`, converting nlohmann errors into Error(kParse) and prefixing
// parse errors with `context`.
template <typename Fn>
auto Guard(std::string_view context, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParse) throw;
    ParseFail(std::string(context) + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    ParseFail(std::string(context) + ": " + e.what());
  }
}

const Json& Field(const Json& j, const char* key) {
  if (!j.is_object()) ParseFail(std::string("expected object with '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) ParseFail(std::string("missing field '") + key + "'");
  return *it;
}

Json OptionalNumber(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json ParseJson(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    ParseFail(std::string("invalid JSON: ") + e.what());
  }
}

Json LoadJson(const std::filesystem::path& path) {
  const auto bytes = ReadFileBytes(path);
  return ParseJson(std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                    bytes.size()));
}

std::string Base64Encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> Base64Decode(std::string_view text) {
  std::string clean;
  clean.reserve(text.size());
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) clean.push_back(c);
  }
  if (clean.size() % 4 != 0) ParseFail("base64 length is not a multiple of 4");
  std::vector<std::uint8_t> out(clean.size() / 4 * 3);
  const int n = EVP_DecodeBlock(out.data(),
                                reinterpret_cast<const unsigned char*>(clean.data()),
                                static_cast<int>(clean.size()));
  if (n < 0) ParseFail("invalid base64");
  std::size_t padding = 0;
  if (!clean.empty() && clean.back() == '=') ++padding;
  if (clean.size() > 1 && clean[clean.size() - 2] == '=') ++padding;
  out.resize(static_cast<std::size_t>(n) - padding);
  return out;
}

Json ToJson(const EnhancementParams& p) {
  return Json{{"max_luminance", p.max_luminance},
              {"max_sat_boost", p.max_sat_boost},
              {"ab_push", p.ab_push},
              {"skip_delta_e", p.skip_delta_e},
              {"gamma", p.gamma},
              {"clahe_clip", p.clahe_clip},
              {"clahe_tiles", p.clahe_tiles},
              {"boost_saturation_distance", p.boost_saturation_distance},
              {"boost_global_scale", p.boost_global_scale}};
}

EnhancementParams ParamsFromJson(const Json& j, const EnhancementParams& base) {
  if (!j.is_object()) ParseFail("params must be a JSON object");
  EnhancementParams p = base;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) ParseFail("param '" + key + "' must be a number");
    const double v = value.get<double>();
    if (key == "max_luminance") p.max_luminance = v;
    else if (key == "max_sat_boost") p.max_sat_boost = v;
    else if (key == "ab_push") p.ab_push = v;
    else if (key == "skip_delta_e") p.skip_delta_e = v;
    else if (key == "gamma") p.gamma = v;
    else if (key == "clahe_clip") p.clahe_clip = v;
    else if (key == "clahe_tiles") {
      if (v != std::floor(v)) ParseFail("clahe_tiles must be an integer");
      p.clahe_tiles = static_cast<int>(v);
    } else if (key == "boost_saturation_distance") p.boost_saturation_distance = v;
    else if (key == "boost_global_scale") p.boost_global_scale = v;
    else ParseFail("unknown param '" + key + "'");
  }
  p.Validate();
  return p;
}

EnhancementParams LoadParams(const std::filesystem::path& path) {
  return ParamsFromJson(LoadJson(path));
}

Json ToJson(const LabColor& c) { return Json::array({c.L, c.a, c.b}); }

LabColor LabFromJson(const Json& j) {
  return Guard("Lab color", [&] {
    if (!j.is_array() || j.size() != 3) ParseFail("Lab color must be [L, a, b]");
    return LabColor{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  });
}

Json ToJson(const Palette& p) {
  Json centroids = Json::array();
  for (const auto& c : p.centroids) centroids.push_back(ToJson(c));
  return Json{{"centroids", centroids}, {"weights", p.weights}};
}

Palette PaletteFromJson(const Json& j) {
  return Guard("palette", [&] {
    Palette p;
    for (const auto& c : Field(j, "centroids")) p.centroids.push_back(LabFromJson(c));
    p.weights = Field(j, "weights").get<std::vector<double>>();
    try {
      ValidatePalette(p);
    } catch (const Error& e) {
      ParseFail(e.what());
    }
    return p;
  });
}

Json ToJson(const PaletteDistances& d) {
  return Json{{"delta_e_total", d.delta_e_total},
              {"delta_l", d.delta_l},
              {"delta_c", d.delta_c},
              {"alpha", d.alpha}};
}

Json ToJson(const Detection& d) {
  Json j{{"id", d.id},
         {"bbox", {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h}},
         {"mask", {{"size", {d.mask.height(), d.mask.width()}},
                   {"counts", EncodeRle(d.mask)}}}};
  j["label"] = d.label ? Json(*d.label) : Json(nullptr);
  return j;
}

Detection DetectionFromJson(const Json& j) {
  return Guard("detection", [&] {
    Detection d;
    const Json& id = Field(j, "id");
    d.id = id.is_string() ? id.get<std::string>() : id.dump();
    const auto box = Field(j, "bbox").get<std::vector<int>>();
    if (box.size() != 4) ParseFail("bbox must be [x, y, w, h]");
    d.bbox = {box[0], box[1], box[2], box[3]};
    if (d.bbox.empty()) ParseFail("detection " + d.id + ": empty bbox");
    const Json& mask = Field(j, "mask");
    const auto size = Field(mask, "size").get<std::vector<int>>();
    if (size.size() != 2 || size[0] != d.bbox.h || size[1] != d.bbox.w) {
      ParseFail("detection " + d.id + ": mask size must equal [bbox h, bbox w]");
    }
    d.mask = DecodeRle(Field(mask, "counts").get<std::vector<std::uint32_t>>(),
                       d.bbox.w, d.bbox.h);
    if (auto it = j.find("label"); it != j.end() && !it->is_null()) {
      d.label = it->get<std::string>();
    }
    return d;
  });
}

Json DetectionsToJson(const std::vector<Detection>& detections) {
  Json out = Json::array();
  for (const auto& d : detections) out.push_back(ToJson(d));
  return out;
}

std::vector<Detection> DetectionsFromJson(const Json& j) {
  if (!j.is_array()) ParseFail("detections must be a JSON array");
  std::vector<Detection> out;
  for (const auto& d : j) out.push_back(DetectionFromJson(d));
  return out;
}

Json ToJson(const SkipDecision& d) {
  return Json{{"skip", d.skip},
              {"reason", SkipReasonName(d.reason)},
              {"target_mean_l", d.target_mean_l},
              {"reference_mean_l", d.reference_mean_l},
              {"shared_delta_e", d.shared_delta_e}};
}

Json ToJson(const ProxyResult& r) {
  Json j{{"skipped", r.skipped()},
         {"reason", r.skipped() ? Json(SkipReasonName(r.decision.reason))
                                : Json(nullptr)},
         {"decision", ToJson(r.decision)},
         {"distances", ToJson(r.distances)},
         {"target_palette", ToJson(r.target_palette)},
         {"timings", {{"quantize_ms", r.timings.quantize_ms},
                      {"analyze_ms", r.timings.analyze_ms},
                      {"enhance_ms", r.timings.enhance_ms}}}};
  if (r.reference_palette.k() > 0) {
    j["reference_palette"] = ToJson(r.reference_palette);
    j["shared_color"] = {{"index", r.shared.index},
                         {"lab", ToJson(r.shared.color)},
                         {"score", r.shared.score}};
  } else {
    j["reference_palette"] = nullptr;
    j["shared_color"] = nullptr;
  }
  return j;
}

Json ToJson(const ReferenceChoice& c) {
  Json candidates = Json::array();
  for (const auto& m : c.candidates) {
    candidates.push_back({{"id", m.id}, {"distance", m.distance}});
  }
  return Json{{"strategy", StrategyName(c.strategy)},
              {"source_id", c.source_id ? Json(*c.source_id) : Json(nullptr)},
              {"distance", OptionalNumber(c.distance)},
              {"candidates", candidates}};
}

Json ToJson(const StageTimings& t) {
  Json stages = Json::object();
  Json fractions = Json::object();
  const auto f = t.fractions();
  for (std::size_t i = 0; i < kStageCount; ++i) {
    const auto name = std::string(StageName(static_cast<Stage>(i)));
    stages[name] = t.ms[i];
    fractions[name] = f[i];
  }
  return Json{{"stages_ms", stages},
              {"fractions", fractions},
              {"total_ms", t.total_ms()},
              {"largest", StageName(t.largest())}};
}

Json ToJson(const PipelineResult& r) {
  Json j = ToJson(r.proxy);
  j["gaze"] = {r.gaze.x, r.gaze.y};
  j["target_id"] = r.target.id;
  j["target_bbox"] = {r.target.bbox.x, r.target.bbox.y, r.target.bbox.w,
                      r.target.bbox.h};
  j["neighbor_ids"] = r.neighbor_ids;
  j["reference"] = ToJson(r.reference);
  j["reference_id"] =
      r.reference.source_id ? Json(*r.reference.source_id) : Json(nullptr);
  j["enhancer_timings"] = j["timings"];
  j["timings"] = ToJson(r.timings);
  j["burst_ms"] = r.burst_ms;
  return j;
}

Json ToJson(const gaze::GazeEvent& e) {
  Json j{{"kind", gaze::EventKindName(e.kind)},
         {"t_start", e.t_start},
         {"t_end", e.t_end}};
  if (e.centroid) {
    j["centroid"] = {e.centroid->yaw, e.centroid->pitch};
    j["zone"] = gaze::ZoneName(e.zone);
  }
  return j;
}

Json ToJson(const gaze::PeripheralityReport& r) {
  return Json{{"t_world_s", r.t_world_s},
              {"t_display_s", r.t_display_s},
              {"t_transition_zone_s", r.t_transition_zone_s},
              {"t_saccade_s", r.t_saccade_s},
              {"transitions", r.transitions},
              {"total_s", r.total_s},
              {"ratio", OptionalNumber(r.ratio())}};
}

Json ToJson(const calibration::ParamSpec& s) {
  return Json{{"name", s.name},
              {"default", s.default_value},
              {"min", s.min},
              {"max", s.max}};
}

std::vector<calibration::ParamSpec> SpecsFromJson(const Json& j) {
  return Guard("param specs", [&] {
    if (!j.is_array()) ParseFail("param specs must be a JSON array");
    std::vector<calibration::ParamSpec> specs;
    for (const auto& s : j) {
      specs.push_back({Field(s, "name").get<std::string>(),
                       Field(s, "default").get<double>(),
                       Field(s, "min").get<double>(),
                       Field(s, "max").get<double>()});
    }
    calibration::ValidateSpecs(specs);
    return specs;
  });
}

std::vector<gaze::GazeSample> ParseGazeJsonl(std::string_view text) {
  std::vector<gaze::GazeSample> samples;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(),
                    [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    const std::string where = "gaze log line " + std::to_string(line_no);
    samples.push_back(Guard(where, [&] {
      const Json j = ParseJson(line);
      gaze::GazeSample s;
      s.t = Field(j, "t").get<double>();
      s.dir = {Field(j, "yaw").get<double>(), Field(j, "pitch").get<double>()};
      if (auto it = j.find("hit"); it != j.end() && !it->is_null()) {
        s.hit = it->is_string() ? it->get<std::string>() : it->dump();
      }
      return s;
    }));
  }
  return samples;
}

}  // namespace proxykit
