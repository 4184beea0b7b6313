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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "proxykit/calibration.hpp"
#include "proxykit/enhancer.hpp"
#include "proxykit/pipeline.hpp"

namespace httplib {
class Server;
}

namespace proxykit {

struct BindAddress {
  std::string host = "127.0.0.1";
  int port = 8080;
};

// "host:port" or ":port". Throws Error(kInvalidArgument).
BindAddress ParseBindAddress(const std::string& text);

class HttpService {
 public:
  virtual ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Returns the bound port (an ephemeral one when `port` is 0).
  // Throws Error(kIo) when the address cannot be bound.
  int Bind(const std::string& host, int port);
  // Serves until Stop(); call after Bind().
  void Run();
  void Stop();
  void WaitUntilReady() const;

 protected:
  HttpService();
  httplib::Server& server() { return *server_; }

 private:
  std::unique_ptr<httplib::Server> server_;
};

struct ProxyServiceConfig {
  EnhancementParams params;
  std::uint64_t seed = kDefaultSeed;
  int k = kDefaultClusters;
  double rate_limit_per_s = 10.0;
  double burst = 10.0;
  // Used when a request carries no inline detections.
  std::shared_ptr<SegmentationBackend> backend;
};

// POST /proxy (multipart: frame PNG, gaze "x,y" | "decode", strategy,
// params JSON overrides, detections JSON) and GET /healthz.
class ProxyService final : public HttpService {
 public:
  explicit ProxyService(ProxyServiceConfig config);

 private:
  ProxyServiceConfig config_;
  TokenBucket bucket_;
};

struct CalibrationServiceConfig {
  std::vector<calibration::ParamSpec> specs = calibration::DefaultSpecs();
  EnhancementParams base;
  // Static UI bundle mounted at "/" when set.
  std::optional<std::filesystem::path> static_dir;
};

// POST /session, GET /session/{id}/comparison, POST /session/{id}/choice,
// GET /session/{id}/result, GET /healthz.
class CalibrationService final : public HttpService {
 public:
  explicit CalibrationService(CalibrationServiceConfig config);

 private:
  CalibrationServiceConfig config_;
  calibration::SessionStore store_;
};

}  // namespace proxykit
