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

#include "proxykit/colorspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace proxykit {
namespace {

// D65 reference white, Y normalized to 1.
constexpr double kWhiteX = 0.95047;
constexpr double kWhiteY = 1.0;
constexpr double kWhiteZ = 1.08883;

constexpr double kDelta = 6.0 / 29.0;

double Linearize(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double Delinearize(double c) {
  return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

double LabF(double t) {
  return t > kDelta * kDelta * kDelta ? std::cbrt(t)
                                      : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double LabFInverse(double t) {
  return t > kDelta ? t * t * t : 3.0 * kDelta * kDelta * (t - 4.0 / 29.0);
}

double Clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

}  // namespace

RgbColor ToRgb(Rgb8 c) { return {c.r / 255.0, c.g / 255.0, c.b / 255.0}; }

Rgb8 ToRgb8(const RgbColor& c) {
  auto q = [](double v) {
    return static_cast<std::uint8_t>(std::lround(Clamp01(v) * 255.0));
  };
  return {q(c.r), q(c.g), q(c.b)};
}

LabColor RgbToLab(const RgbColor& c) {
  const double r = Linearize(c.r);
  const double g = Linearize(c.g);
  const double b = Linearize(c.b);
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  const double fx = LabF(x / kWhiteX);
  const double fy = LabF(y / kWhiteY);
  const double fz = LabF(z / kWhiteZ);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

RgbColor LabToRgb(const LabColor& c) {
  const double fy = (c.L + 16.0) / 116.0;
  const double fx = fy + c.a / 500.0;
  const double fz = fy - c.b / 200.0;
  const double x = kWhiteX * LabFInverse(fx);
  const double y = kWhiteY * LabFInverse(fy);
  const double z = kWhiteZ * LabFInverse(fz);
  const double r = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
  const double g = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
  const double b = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;
  return {Clamp01(Delinearize(Clamp01(r))), Clamp01(Delinearize(Clamp01(g))),
          Clamp01(Delinearize(Clamp01(b)))};
}

HsvColor RgbToHsv(const RgbColor& c) {
  const double max = std::max({c.r, c.g, c.b});
  const double min = std::min({c.r, c.g, c.b});
  const double d = max - min;
  HsvColor out{0.0, max > 0.0 ? d / max : 0.0, max};
  if (d <= 0.0) return out;
  double h;
  if (max == c.r) {
    h = std::fmod((c.g - c.b) / d, 6.0);
  } else if (max == c.g) {
    h = (c.b - c.r) / d + 2.0;
  } else {
    h = (c.r - c.g) / d + 4.0;
  }
  h *= 60.0;
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  out.h = h;
  return out;
}

RgbColor HsvToRgb(const HsvColor& c) {
  const double s = Clamp01(c.s);
  const double v = Clamp01(c.v);
  double h = std::fmod(c.h, 360.0);
  if (h < 0.0) h += 360.0;
  const double chroma = v * s;
  const double hp = h / 60.0;
  const double x = chroma * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp)) {
    case 0: r = chroma; g = x; break;
    case 1: r = x; g = chroma; break;
    case 2: g = chroma; b = x; break;
    case 3: g = x; b = chroma; break;
    case 4: r = x; b = chroma; break;
    default: r = chroma; b = x; break;
  }
  const double m = v - chroma;
  return {Clamp01(r + m), Clamp01(g + m), Clamp01(b + m)};
}

double Chroma(const LabColor& c) { return std::hypot(c.a, c.b); }

double Ciede2000(const LabColor& x, const LabColor& y) {
  const double c1 = std::hypot(x.a, x.b);
  const double c2 = std::hypot(y.a, y.b);
  const double c_bar = 0.5 * (c1 + c2);
  const double c_bar7 = std::pow(c_bar, 7.0);
  const double g =
      0.5 * (1.0 - std::sqrt(c_bar7 / (c_bar7 + 6103515625.0)));  // 25^7

  const double a1p = (1.0 + g) * x.a;
  const double a2p = (1.0 + g) * y.a;
  const double c1p = std::hypot(a1p, x.b);
  const double c2p = std::hypot(a2p, y.b);

  auto hue = [](double b, double ap) {
    if (b == 0.0 && ap == 0.0) return 0.0;
    double h = std::atan2(b, ap) * kRadToDeg;
    return h < 0.0 ? h + 360.0 : h;
  };
  const double h1p = hue(x.b, a1p);
  const double h2p = hue(y.b, a2p);

  const double dLp = y.L - x.L;
  const double dCp = c2p - c1p;
  double dhp = 0.0;
  if (c1p * c2p != 0.0) {
    dhp = h2p - h1p;
    if (dhp > 180.0) {
      dhp -= 360.0;
    } else if (dhp < -180.0) {
      dhp += 360.0;
    }
  }
  const double dHp = 2.0 * std::sqrt(c1p * c2p) * std::sin(0.5 * dhp * kDegToRad);

  const double L_bar = 0.5 * (x.L + y.L);
  const double cp_bar = 0.5 * (c1p + c2p);
  double hp_bar = h1p + h2p;
  if (c1p * c2p != 0.0) {
    if (std::fabs(h1p - h2p) <= 180.0) {
      hp_bar *= 0.5;
    } else if (h1p + h2p < 360.0) {
      hp_bar = 0.5 * (hp_bar + 360.0);
    } else {
      hp_bar = 0.5 * (hp_bar - 360.0);
    }
  }

  const double t = 1.0 - 0.17 * std::cos((hp_bar - 30.0) * kDegToRad) +
                   0.24 * std::cos(2.0 * hp_bar * kDegToRad) +
                   0.32 * std::cos((3.0 * hp_bar + 6.0) * kDegToRad) -
                   0.20 * std::cos((4.0 * hp_bar - 63.0) * kDegToRad);
  const double d_theta =
      30.0 * std::exp(-((hp_bar - 275.0) / 25.0) * ((hp_bar - 275.0) / 25.0));
  const double cp_bar7 = std::pow(cp_bar, 7.0);
  const double rc = 2.0 * std::sqrt(cp_bar7 / (cp_bar7 + 6103515625.0));
  const double l50 = (L_bar - 50.0) * (L_bar - 50.0);
  const double sl = 1.0 + 0.015 * l50 / std::sqrt(20.0 + l50);
  const double sc = 1.0 + 0.045 * cp_bar;
  const double sh = 1.0 + 0.015 * cp_bar * t;
  const double rt = -std::sin(2.0 * d_theta * kDegToRad) * rc;

  const double tl = dLp / sl;
  const double tc = dCp / sc;
  const double th = dHp / sh;
  return std::sqrt(std::max(0.0, tl * tl + tc * tc + th * th + rt * tc * th));
}

}  // namespace proxykit
