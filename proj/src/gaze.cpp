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

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "proxykit/error.hpp"

namespace proxykit::gaze {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

struct Window {
  double min_yaw, max_yaw, min_pitch, max_pitch;

  explicit Window(Angles a)
      : min_yaw(a.yaw), max_yaw(a.yaw), min_pitch(a.pitch), max_pitch(a.pitch) {}

  void Add(Angles a) {
    min_yaw = std::min(min_yaw, a.yaw);
    max_yaw = std::max(max_yaw, a.yaw);
    min_pitch = std::min(min_pitch, a.pitch);
    max_pitch = std::max(max_pitch, a.pitch);
  }
  double Dispersion() const {
    return (max_yaw - min_yaw) + (max_pitch - min_pitch);
  }
};

// Salvucci-style I-DT over samples [first, last] (each owning the interval
// to the next sample; t[last + 1] always exists).
void DetectFixations(const std::vector<GazeSample>& s, std::size_t first,
                     std::size_t last, const ClassifierConfig& cfg,
                     std::vector<GazeEvent>& out) {
  std::size_t start = first;
  while (start <= last) {
    std::size_t end = start;
    while (end <= last && s[end + 1].t - s[start].t < cfg.min_fixation_ms) ++end;
    if (end > last) return;

    Window window(s[start].dir);
    for (std::size_t i = start + 1; i <= end; ++i) window.Add(s[i].dir);
    if (window.Dispersion() > cfg.dispersion_threshold_deg) {
      ++start;
      continue;
    }
    while (end + 1 <= last) {
      Window grown = window;
      grown.Add(s[end + 1].dir);
      if (grown.Dispersion() > cfg.dispersion_threshold_deg) break;
      window = grown;
      ++end;
    }
    Angles centroid{};
    for (std::size_t i = start; i <= end; ++i) {
      centroid.yaw += s[i].dir.yaw;
      centroid.pitch += s[i].dir.pitch;
    }
    const double count = static_cast<double>(end - start + 1);
    centroid.yaw /= count;
    centroid.pitch /= count;

    GazeEvent e;
    e.kind = EventKind::kFixation;
    e.t_start = s[start].t;
    e.t_end = s[end + 1].t;
    e.first_sample = start;
    e.last_sample = end;
    e.centroid = centroid;
    out.push_back(e);
    start = end + 1;
  }
}

}  // namespace

std::string_view EventKindName(EventKind kind) {
  return kind == EventKind::kFixation ? "fixation" : "saccade";
}

std::string_view ZoneName(Zone zone) {
  switch (zone) {
    case Zone::kWorld: return "world";
    case Zone::kDisplay: return "display";
    case Zone::kTransition: return "transition";
  }
  return "world";
}

double AngularDistance(Angles a, Angles b) {
  auto unit = [](Angles x) {
    const double yaw = x.yaw * kDegToRad, pitch = x.pitch * kDegToRad;
    return std::array<double, 3>{std::cos(pitch) * std::sin(yaw), std::sin(pitch),
                                 std::cos(pitch) * std::cos(yaw)};
  };
  const auto u = unit(a);
  const auto v = unit(b);
  const double cx = u[1] * v[2] - u[2] * v[1];
  const double cy = u[2] * v[0] - u[0] * v[2];
  const double cz = u[0] * v[1] - u[1] * v[0];
  const double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot) / kDegToRad;
}

std::vector<GazeEvent> Classify(const std::vector<GazeSample>& trace,
                                const ClassifierConfig& config) {
  if (trace.size() < 2) {
    throw Error(ErrorCode::kTooFewSamples, "need at least 2 gaze samples");
  }
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (!(trace[i].t > trace[i - 1].t)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "gaze samples must be strictly time-ordered");
    }
  }
  const std::size_t owners = trace.size() - 1;
  std::vector<bool> saccadic(owners);
  for (std::size_t i = 0; i < owners; ++i) {
    const double dt_s = (trace[i + 1].t - trace[i].t) / 1000.0;
    saccadic[i] = AngularDistance(trace[i].dir, trace[i + 1].dir) / dt_s >
                  config.velocity_threshold_deg_per_s;
  }

  std::vector<GazeEvent> events;
  std::size_t i = 0;
  while (i < owners) {
    std::size_t j = i;
    while (j + 1 < owners && saccadic[j + 1] == saccadic[i]) ++j;
    if (saccadic[i]) {
      if (trace[j + 1].t - trace[i].t <= config.max_saccade_ms) {
        GazeEvent e;
        e.kind = EventKind::kSaccade;
        e.t_start = trace[i].t;
        e.t_end = trace[j + 1].t;
        e.first_sample = i;
        e.last_sample = j;
        events.push_back(e);
      }
    } else {
      DetectFixations(trace, i, j, config, events);
    }
    i = j + 1;
  }
  return events;
}

double DistanceToRect(Angles dir, const DisplayRect& rect) {
  const double dx =
      std::max(0.0, std::fabs(dir.yaw - rect.center.yaw) - rect.width / 2.0);
  const double dy =
      std::max(0.0, std::fabs(dir.pitch - rect.center.pitch) - rect.height / 2.0);
  return std::hypot(dx, dy);
}

double AmbientValue(Angles dir, const DisplayRect& rect, double ramp_deg) {
  const double d = DistanceToRect(dir, rect);
  if (d <= 0.0) return 1.0;
  return std::max(0.0, 1.0 - d / ramp_deg);
}

Zone ZoneOf(Angles dir, const DisplayRect& rect) {
  const double a = AmbientValue(dir, rect);
  if (a >= 1.0) return Zone::kDisplay;
  if (a <= 0.0) return Zone::kWorld;
  return Zone::kTransition;
}

void AssignZones(std::vector<GazeEvent>& events, const DisplayRect& rect) {
  for (auto& e : events) {
    if (e.kind == EventKind::kFixation && e.centroid) {
      e.zone = ZoneOf(*e.centroid, rect);
    }
  }
}

std::optional<double> PeripheralityReport::ratio() const {
  if (t_display_s <= 0.0) return std::nullopt;
  return t_world_s / t_display_s;
}

PeripheralityReport Peripherality(std::vector<GazeEvent> events,
                                  const DisplayRect& rect,
                                  std::optional<double> total_s) {
  AssignZones(events, rect);
  PeripheralityReport r;
  for (std::size_t k = 0; k < events.size(); ++k) {
    const GazeEvent& e = events[k];
    const double seconds = e.duration() / 1000.0;
    if (e.kind == EventKind::kSaccade) {
      r.t_saccade_s += seconds;
      if (k == 0 || k + 1 >= events.size()) continue;
      const GazeEvent& before = events[k - 1];
      const GazeEvent& after = events[k + 1];
      const bool flanked = before.kind == EventKind::kFixation &&
                           after.kind == EventKind::kFixation &&
                           before.zone != Zone::kTransition &&
                           after.zone != Zone::kTransition;
      if (flanked && before.zone != after.zone) ++r.transitions;
      continue;
    }
    switch (e.zone) {
      case Zone::kWorld: r.t_world_s += seconds; break;
      case Zone::kDisplay: r.t_display_s += seconds; break;
      case Zone::kTransition: r.t_transition_zone_s += seconds; break;
    }
  }
  if (total_s) {
    r.total_s = *total_s;
  } else if (!events.empty()) {
    r.total_s = (events.back().t_end - events.front().t_start) / 1000.0;
  }
  return r;
}

std::optional<std::string> FlashlightSelect(Angles dir,
                                            const std::vector<SceneObject>& objects,
                                            double cone_half_angle_deg) {
  const SceneObject* best = nullptr;
  double best_d = 0.0;
  for (const auto& o : objects) {
    const double d = AngularDistance(dir, o.position);
    if (d > cone_half_angle_deg) continue;
    if (!best || d < best_d || (d == best_d && o.id < best->id)) {
      best = &o;
      best_d = d;
    }
  }
  if (!best) return std::nullopt;
  return best->id;
}

}  // namespace proxykit::gaze
