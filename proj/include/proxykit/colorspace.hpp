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

#include "proxykit/image.hpp"

namespace proxykit {

// sRGB with channels in [0, 1].
struct RgbColor {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const RgbColor&, const RgbColor&) = default;
};

// CIELAB relative to the D65 white point. L in [0, 100].
struct LabColor {
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;

  friend bool operator==(const LabColor&, const LabColor&) = default;
};

// Hexcone HSV: h in degrees [0, 360), s and v in [0, 1].
struct HsvColor {
  double h = 0.0;
  double s = 0.0;
  double v = 0.0;
};

RgbColor ToRgb(Rgb8 c);
// Rounds to nearest; clamps to [0, 255].
Rgb8 ToRgb8(const RgbColor& c);

LabColor RgbToLab(const RgbColor& c);
// Out-of-gamut results are clamped to [0, 1] per channel.
RgbColor LabToRgb(const LabColor& c);

// Achromatic inputs get hue 0.
HsvColor RgbToHsv(const RgbColor& c);
RgbColor HsvToRgb(const HsvColor& c);

inline LabColor Rgb8ToLab(Rgb8 c) { return RgbToLab(ToRgb(c)); }
inline Rgb8 LabToRgb8(const LabColor& c) { return ToRgb8(LabToRgb(c)); }

// Lab chroma sqrt(a^2 + b^2).
double Chroma(const LabColor& c);

// CIEDE2000 color difference with kL = kC = kH = 1.
double Ciede2000(const LabColor& x, const LabColor& y);

}  // namespace proxykit
