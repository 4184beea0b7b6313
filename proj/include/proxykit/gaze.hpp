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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace proxykit::gaze {

// Gaze ray direction in degrees.
struct Angles {
  double yaw = 0.0;
  double pitch = 0.0;
};

struct GazeSample {
  double t = 0.0;  // ms
  Angles dir;
  std::optional<std::string> hit;
};

enum class EventKind { kFixation, kSaccade };
enum class Zone { kWorld, kDisplay, kTransition };

std::string_view EventKindName(EventKind kind);
std::string_view ZoneName(Zone zone);

// Each sample owns the interval up to the next sample, so an event spans
// [t of its first sample, t of the sample after its last).
struct GazeEvent {
  EventKind kind = EventKind::kFixation;
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t first_sample = 0;
  std::size_t last_sample = 0;  // inclusive
  std::optional<Angles> centroid;  // fixations only
  Zone zone = Zone::kWorld;

  double duration() const { return t_end - t_start; }
};

struct ClassifierConfig {
  double velocity_threshold_deg_per_s = 30.0;
  double dispersion_threshold_deg = 1.0;
  double min_fixation_ms = 50.0;
  double max_saccade_ms = 30.0;
};

// Angle between two gaze directions, in degrees.
double AngularDistance(Angles a, Angles b);

// I-VT marks saccade samples; I-DT finds fixations inside the remaining
// runs. Saccade runs longer than max_saccade_ms and dispersion windows
// shorter than min_fixation_ms are left unclassified. Events are
// time-ordered and never overlap. Zones are not assigned here.
// Throws Error(kTooFewSamples) for fewer than 2 samples and
// Error(kInvalidArgument) for non-increasing timestamps.
std::vector<GazeEvent> Classify(const std::vector<GazeSample>& trace,
                                const ClassifierConfig& config = {});

struct DisplayRect {
  Angles center;
  double width = 20.0;   // degrees
  double height = 15.0;  // degrees
};

inline constexpr double kAmbientRampDeg = 10.0;

// Angular distance from `dir` to the nearest rect edge (0 inside).
double DistanceToRect(Angles dir, const DisplayRect& rect);

// 1 inside the display, 0 at >= 10 degrees from its boundary, linear between.
double AmbientValue(Angles dir, const DisplayRect& rect,
                    double ramp_deg = kAmbientRampDeg);

Zone ZoneOf(Angles dir, const DisplayRect& rect);

// Sets each fixation's zone from the ambient value of its centroid.
void AssignZones(std::vector<GazeEvent>& events, const DisplayRect& rect);

struct PeripheralityReport {
  double t_world_s = 0.0;
  double t_display_s = 0.0;
  double t_transition_zone_s = 0.0;
  double t_saccade_s = 0.0;
  int transitions = 0;
  double total_s = 0.0;

  // tW / tD; nullopt when tD is zero.
  std::optional<double> ratio() const;
};

// Zones are (re)assigned from `rect`. `total_s` defaults to the span from
// the first event start to the last event end.
PeripheralityReport Peripherality(std::vector<GazeEvent> events,
                                  const DisplayRect& rect,
                                  std::optional<double> total_s = std::nullopt);

struct SceneObject {
  std::string id;
  Angles position;
};

// Closest object (by angular distance) inside the cone around `dir`; ties
// go to the lower id.
std::optional<std::string> FlashlightSelect(Angles dir,
                                            const std::vector<SceneObject>& objects,
                                            double cone_half_angle_deg);

}  // namespace proxykit::gaze
