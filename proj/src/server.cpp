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

#include "proxykit/server.hpp"

#include <charconv>
#include <regex>

#include "httplib.h"
#include "proxykit/error.hpp"
#include "proxykit/json_io.hpp"

namespace proxykit {
namespace {

int HttpStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNoTarget:
    case ErrorCode::kUnknownSession:
      return 404;
    case ErrorCode::kSessionComplete:
    case ErrorCode::kOutOfOrder:
      return 409;
    case ErrorCode::kBackendUnavailable:
      return 502;
    case ErrorCode::kTimeout:
      return 504;
    case ErrorCode::kIo:
      return 500;
    default:
      return 422;
  }
}

void SendJson(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void SendError(httplib::Response& res, int status, std::string_view name,
               std::string_view message) {
  SendJson(res, status, Json{{"error", name}, {"message", message}});
}

// Runs a handler, mapping library errors onto HTTP status codes.
template <typename Fn>
void Handle(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    SendError(res, HttpStatus(e.code()), e.name(), e.what());
  } catch (const std::exception& e) {
    SendError(res, 500, "Internal", e.what());
  }
}

std::span<const std::uint8_t> AsBytes(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

int ParseInt(std::string_view text, const char* what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("invalid ") + what);
  }
  return v;
}

// "x,y", "decode" or {"x": .., "y": ..}.
std::optional<Pixel> ParseGaze(const std::string& text) {
  if (text == "decode") return std::nullopt;
  if (!text.empty() && text.front() == '{') {
    const Json j = ParseJson(text);
    try {
      return Pixel{j.at("x").get<int>(), j.at("y").get<int>()};
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::kParse, "gaze object needs integer x and y");
    }
  }
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "gaze must be 'x,y' or 'decode'");
  }
  return Pixel{ParseInt(std::string_view(text).substr(0, comma), "gaze x"),
               ParseInt(std::string_view(text).substr(comma + 1), "gaze y")};
}

RasterRegion RegionFromJson(const Json& j) {
  try {
    const DecodedImage image = DecodePng(Base64Decode(j.at("png").get<std::string>()));
    Mask mask = image.alpha ? *image.alpha
                            : Mask(image.raster.width(), image.raster.height(), true);
    if (auto it = j.find("mask_png"); it != j.end()) {
      mask = MaskFromRaster(DecodePng(Base64Decode(it->get<std::string>())).raster);
    }
    return {image.raster, mask};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("stimulus region: ") + e.what());
  }
}

Json ComparisonJson(const calibration::Comparison& c, int per_param) {
  return Json{{"param", c.param},
              {"param_index", c.param_index},
              {"comparison_index", c.comparison_index},
              {"comparisons_per_param", per_param},
              {"option_a", c.option_a},
              {"option_b", c.option_b}};
}

Json ResultJson(const std::string& id, const calibration::SessionStore::Entry& e) {
  const auto& s = e.session;
  Json values = Json::object();
  Json params = Json::array();
  for (std::size_t i = 0; i < s.specs().size(); ++i) {
    const auto& spec = s.specs()[i];
    const auto& st = s.states()[i];
    values[spec.name] = st.fixed ? Json(*st.fixed) : Json(nullptr);
    Json p = ToJson(spec);
    p["baseline"] = st.baseline;
    p["bound"] = st.bound ? Json(*st.bound) : Json(nullptr);
    p["comparisons_done"] = st.comparisons_done;
    p["fixed"] = values[spec.name];
    params.push_back(p);
  }
  Json transcript = Json::array();
  for (const auto& c : s.transcript()) {
    transcript.push_back({{"param", c.param},
                          {"comparison_index", c.comparison_index},
                          {"option_a", c.option_a},
                          {"option_b", c.option_b},
                          {"chosen", c.chosen}});
  }
  return Json{{"id", id},
              {"complete", s.done()},
              {"values", values},
              {"params", params},
              {"transcript", transcript},
              {"enhancement_params", ToJson(s.CurrentParams(e.base))}};
}

Json ParseBody(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  Json j = ParseJson(req.body);
  if (!j.is_object()) throw Error(ErrorCode::kParse, "request body must be a JSON object");
  return j;
}

}  // namespace

BindAddress ParseBindAddress(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "bind address must be host:port");
  }
  BindAddress addr;
  if (colon > 0) addr.host = text.substr(0, colon);
  addr.port = ParseInt(std::string_view(text).substr(colon + 1), "bind port");
  if (addr.port < 0 || addr.port > 65535) {
    throw Error(ErrorCode::kInvalidArgument, "bind port out of range");
  }
  return addr;
}

HttpService::HttpService() : server_(std::make_unique<httplib::Server>()) {
  server_->Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    SendJson(res, 200, Json{{"status", "ok"}});
  });
}

HttpService::~HttpService() { Stop(); }

int HttpService::Bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::kIo, "cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpService::Run() { server_->listen_after_bind(); }

void HttpService::Stop() {
  if (server_->is_running()) server_->stop();
}

void HttpService::WaitUntilReady() const { server_->wait_until_ready(); }

ProxyService::ProxyService(ProxyServiceConfig config)
    : config_(std::move(config)),
      bucket_(config_.rate_limit_per_s, config_.burst) {
  config_.params.Validate();
  server().Post("/proxy", [this](const httplib::Request& req,
                                 httplib::Response& res) {
    if (!bucket_.TryAcquire()) {
      SendError(res, 429, "RateLimited", "request rate limit exceeded");
      return;
    }
    Handle(res, [&] {
      if (!req.is_multipart_form_data() || !req.has_file("frame")) {
        throw Error(ErrorCode::kInvalidArgument,
                    "expected multipart/form-data with a 'frame' PNG part");
      }
      const Raster frame = DecodePng(AsBytes(req.get_file_value("frame").content)).raster;
      const std::optional<Pixel> gaze =
          req.has_file("gaze") ? ParseGaze(req.get_file_value("gaze").content)
                               : std::nullopt;

      PipelineConfig pc;
      pc.seed = config_.seed;
      pc.k = config_.k;
      pc.params = config_.params;
      if (req.has_file("strategy")) {
        pc.strategy = ParseStrategy(req.get_file_value("strategy").content);
      }
      if (req.has_file("params")) {
        pc.params = ParamsFromJson(ParseJson(req.get_file_value("params").content),
                                   config_.params);
      }

      PipelineResult result;
      if (req.has_file("detections")) {
        StaticDetections inline_backend(DetectionsFromJson(
            ParseJson(req.get_file_value("detections").content)));
        result = RunPipeline(frame, gaze, inline_backend, pc);
      } else if (config_.backend) {
        result = RunPipeline(frame, gaze, *config_.backend, pc);
      } else {
        throw Error(ErrorCode::kInvalidArgument,
                    "no detections part and no segmentation backend configured");
      }
      Json body = ToJson(result);
      body["proxy"] = Base64Encode(EncodeProxyPng(result.proxy.proxy));
      SendJson(res, 200, body);
    });
  });
}

CalibrationService::CalibrationService(CalibrationServiceConfig config)
    : config_(std::move(config)) {
  calibration::ValidateSpecs(config_.specs);
  config_.base.Validate();
  auto& srv = server();
  if (config_.static_dir) {
    if (!srv.set_mount_point("/", config_.static_dir->string())) {
      throw Error(ErrorCode::kIo, "static directory not found: " +
                                      config_.static_dir->string());
    }
  }

  srv.Post("/session", [this](const httplib::Request& req, httplib::Response& res) {
    Handle(res, [&] {
      const Json body = ParseBody(req);
      auto specs = config_.specs;
      if (auto it = body.find("specs"); it != body.end()) specs = SpecsFromJson(*it);
      EnhancementParams base = config_.base;
      if (auto it = body.find("params"); it != body.end()) {
        base = ParamsFromJson(*it, base);
      }
      int per_param = calibration::kComparisonsPerParam;
      if (auto it = body.find("comparisons_per_param"); it != body.end()) {
        if (!it->is_number_integer()) {
          throw Error(ErrorCode::kParse, "comparisons_per_param must be an integer");
        }
        per_param = it->get<int>();
      }
      calibration::Stimulus stimulus;
      if (auto it = body.find("stimulus"); it != body.end()) {
        if (!it->contains("target") || !it->contains("reference")) {
          throw Error(ErrorCode::kParse, "stimulus needs target and reference");
        }
        stimulus = calibration::MakeStimulus(RegionFromJson(it->at("target")),
                                             RegionFromJson(it->at("reference")));
      } else {
        stimulus = calibration::BuiltinStimulus();
      }
      const std::string id =
          store_.Create(std::move(specs), std::move(stimulus), base, per_param);
      const auto entry = store_.Get(id);
      std::lock_guard lock(entry->mu);
      SendJson(res, 201, ResultJson(id, *entry));
    });
  });

  srv.Get(R"(/session/([^/]+)/comparison)",
          [this](const httplib::Request& req, httplib::Response& res) {
            Handle(res, [&] {
              const auto entry = store_.Get(req.matches[1]);
              std::lock_guard lock(entry->mu);
              const auto pair = calibration::RenderComparison(
                  entry->session, entry->stimulus, entry->base);
              Json body = ComparisonJson(pair.comparison,
                                         entry->session.comparisons_per_param());
              body["proxy_a"] = Base64Encode(EncodeProxyPng(pair.proxy_a));
              body["proxy_b"] = Base64Encode(EncodeProxyPng(pair.proxy_b));
              body["stimulus"] = {
                  {"target", Base64Encode(EncodeProxyPng(entry->stimulus.target.region()))},
                  {"reference",
                   Base64Encode(EncodeProxyPng(entry->stimulus.reference.region()))}};
              SendJson(res, 200, body);
            });
          });

  srv.Post(R"(/session/([^/]+)/choice)",
           [this](const httplib::Request& req, httplib::Response& res) {
             Handle(res, [&] {
               const auto entry = store_.Get(req.matches[1]);
               const Json body = ParseBody(req);
               std::lock_guard lock(entry->mu);
               auto& session = entry->session;
               const auto current = session.Next();
               if (!body.contains("param") || !body.contains("comparison_index")) {
                 throw Error(ErrorCode::kParse,
                             "choice needs 'param' and 'comparison_index'");
               }
               try {
                 if (body.at("param").get<std::string>() != current.param ||
                     body.at("comparison_index").get<int>() !=
                         current.comparison_index) {
                   throw Error(ErrorCode::kOutOfOrder,
                               "expected " + current.param + " comparison " +
                                   std::to_string(current.comparison_index));
                 }
                 double chosen;
                 if (auto it = body.find("option"); it != body.end()) {
                   const auto opt = it->get<std::string>();
                   if (opt != "a" && opt != "b") {
                     throw Error(ErrorCode::kInvalidChoice, "option must be 'a' or 'b'");
                   }
                   chosen = opt == "a" ? current.option_a : current.option_b;
                 } else {
                   chosen = body.at("chosen").get<double>();
                 }
                 session.Submit(chosen);
               } catch (const nlohmann::json::exception& e) {
                 throw Error(ErrorCode::kParse, std::string("choice: ") + e.what());
               }
               Json out{{"accepted", true}, {"complete", session.done()}};
               out["next"] = session.done()
                                 ? Json(nullptr)
                                 : ComparisonJson(session.Next(),
                                                  session.comparisons_per_param());
               SendJson(res, 200, out);
             });
           });

  srv.Get(R"(/session/([^/]+)/result)",
          [this](const httplib::Request& req, httplib::Response& res) {
            Handle(res, [&] {
              const std::string id = req.matches[1];
              const auto entry = store_.Get(id);
              std::lock_guard lock(entry->mu);
              SendJson(res, 200, ResultJson(id, *entry));
            });
          });
}

}  // namespace proxykit
