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

// Independent reference computations used as test oracles. Nothing here
// calls into the library's numeric code paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

struct Lab {
  double L, a, b;
};

inline constexpr double kPi = 3.14159265358979323846;

// sRGB (D65) -> CIELAB using the CIE epsilon/kappa form.
inline Lab SrgbToLab(double r, double g, double b) {
  auto lin = [](double c) {
    return c > 0.04045 ? std::pow((c + 0.055) / 1.055, 2.4) : c / 12.92;
  };
  const double R = lin(r), G = lin(g), B = lin(b);
  const std::array<double, 3> xyz = {
      0.4124564 * R + 0.3575761 * G + 0.1804375 * B,
      0.2126729 * R + 0.7151522 * G + 0.0721750 * B,
      0.0193339 * R + 0.1191920 * G + 0.9503041 * B};
  const std::array<double, 3> white = {0.95047, 1.0, 1.08883};
  const double eps = 216.0 / 24389.0;
  const double kappa = 24389.0 / 27.0;
  std::array<double, 3> f{};
  for (int i = 0; i < 3; ++i) {
    const double t = xyz[i] / white[i];
    f[i] = t > eps ? std::cbrt(t) : (kappa * t + 16.0) / 116.0;
  }
  return {116.0 * f[1] - 16.0, 500.0 * (f[0] - f[1]), 200.0 * (f[1] - f[2])};
}

// Hexcone model, hue in degrees.
inline std::array<double, 3> RgbToHsv(double r, double g, double b) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double c = mx - mn;
  double h = 0.0;
  if (c > 0) {
    if (mx == r) {
      h = 60.0 * ((g - b) / c);
    } else if (mx == g) {
      h = 60.0 * ((b - r) / c) + 120.0;
    } else {
      h = 60.0 * ((r - g) / c) + 240.0;
    }
    if (h < 0) h += 360.0;
  }
  return {h, mx == 0 ? 0.0 : c / mx, mx};
}

// CIEDE2000, transcribed in radians with the explicit case split on the
// mean hue.
inline double Ciede2000(const Lab& p, const Lab& q) {
  const double C1 = std::sqrt(p.a * p.a + p.b * p.b);
  const double C2 = std::sqrt(q.a * q.a + q.b * q.b);
  const double Cm = (C1 + C2) / 2.0;
  const double G =
      0.5 * (1.0 - std::sqrt(std::pow(Cm, 7) / (std::pow(Cm, 7) + std::pow(25.0, 7))));
  const double a1 = p.a * (1 + G), a2 = q.a * (1 + G);
  const double C1p = std::sqrt(a1 * a1 + p.b * p.b);
  const double C2p = std::sqrt(a2 * a2 + q.b * q.b);
  auto hp = [](double b, double a) {
    if (a == 0 && b == 0) return 0.0;
    double h = std::atan2(b, a);
    if (h < 0) h += 2 * kPi;
    return h;
  };
  const double h1 = hp(p.b, a1), h2 = hp(q.b, a2);
  const double dL = q.L - p.L;
  const double dC = C2p - C1p;
  double dh;
  if (C1p * C2p == 0) {
    dh = 0;
  } else if (std::fabs(h2 - h1) <= kPi) {
    dh = h2 - h1;
  } else if (h2 - h1 > kPi) {
    dh = h2 - h1 - 2 * kPi;
  } else {
    dh = h2 - h1 + 2 * kPi;
  }
  const double dH = 2 * std::sqrt(C1p * C2p) * std::sin(dh / 2);
  const double Lm = (p.L + q.L) / 2;
  const double Cmp = (C1p + C2p) / 2;
  double Hm;
  if (C1p * C2p == 0) {
    Hm = h1 + h2;
  } else if (std::fabs(h1 - h2) <= kPi) {
    Hm = (h1 + h2) / 2;
  } else if (h1 + h2 < 2 * kPi) {
    Hm = (h1 + h2 + 2 * kPi) / 2;
  } else {
    Hm = (h1 + h2 - 2 * kPi) / 2;
  }
  const double deg = kPi / 180.0;
  const double T = 1 - 0.17 * std::cos(Hm - 30 * deg) + 0.24 * std::cos(2 * Hm) +
                   0.32 * std::cos(3 * Hm + 6 * deg) -
                   0.20 * std::cos(4 * Hm - 63 * deg);
  const double Hm_deg = Hm / deg;
  const double dTheta = 30 * deg * std::exp(-std::pow((Hm_deg - 275) / 25, 2));
  const double Rc = 2 * std::sqrt(std::pow(Cmp, 7) / (std::pow(Cmp, 7) + std::pow(25.0, 7)));
  const double SL =
      1 + 0.015 * std::pow(Lm - 50, 2) / std::sqrt(20 + std::pow(Lm - 50, 2));
  const double SC = 1 + 0.045 * Cmp;
  const double SH = 1 + 0.015 * Cmp * T;
  const double RT = -std::sin(2 * dTheta) * Rc;
  return std::sqrt(std::pow(dL / SL, 2) + std::pow(dC / SC, 2) +
                   std::pow(dH / SH, 2) + RT * (dC / SC) * (dH / SH));
}

// Full-batch Lloyd k-means with k-means++ restarts; returns the best
// within-cluster sum of squared distances.
inline double BestFullBatchWcss(const std::vector<Lab>& pts, int k, int restarts,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto d2 = [](const Lab& x, const Lab& y) {
    return (x.L - y.L) * (x.L - y.L) + (x.a - y.a) * (x.a - y.a) +
           (x.b - y.b) * (x.b - y.b);
  };
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    std::vector<Lab> c;
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    c.push_back(pts[pick(rng)]);
    std::vector<double> dist(pts.size());
    while (static_cast<int>(c.size()) < k) {
      double total = 0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& cc : c) m = std::min(m, d2(pts[i], cc));
        dist[i] = m;
        total += m;
      }
      if (total == 0) break;
      std::uniform_real_distribution<double> u(0, total);
      double t = u(rng);
      std::size_t i = 0;
      for (; i + 1 < pts.size(); ++i) {
        t -= dist[i];
        if (t <= 0) break;
      }
      c.push_back(pts[i]);
    }
    std::vector<int> lab(pts.size(), 0);
    double wcss = 0;
    for (int it = 0; it < 300; ++it) {
      bool changed = false;
      wcss = 0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        int bi = 0;
        double bd = d2(pts[i], c[0]);
        for (std::size_t j = 1; j < c.size(); ++j) {
          const double d = d2(pts[i], c[j]);
          if (d < bd) {
            bd = d;
            bi = static_cast<int>(j);
          }
        }
        if (bi != lab[i] || it == 0) changed = true;
        lab[i] = bi;
        wcss += bd;
      }
      if (!changed) break;
      std::vector<Lab> sum(c.size(), Lab{0, 0, 0});
      std::vector<int> cnt(c.size(), 0);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        sum[lab[i]].L += pts[i].L;
        sum[lab[i]].a += pts[i].a;
        sum[lab[i]].b += pts[i].b;
        ++cnt[lab[i]];
      }
      for (std::size_t j = 0; j < c.size(); ++j)
        if (cnt[j]) c[j] = {sum[j].L / cnt[j], sum[j].a / cnt[j], sum[j].b / cnt[j]};
    }
    best = std::min(best, wcss);
  }
  return best;
}

// Type-7 (linear interpolation) sample quantile, computed the textbook way.
inline double Quantile7(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - std::floor(h)) * (v[hi] - v[lo]);
}

}  // namespace oracle
