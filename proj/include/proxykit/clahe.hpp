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

#include <vector>

#include "proxykit/image.hpp"

namespace proxykit {

struct ClaheOptions {
  double clip_limit = 2.0;
  int tiles = 8;  // per axis
};

// Contrast-limited adaptive histogram equalization of a lightness plane
// (values in [0, 100], row-major, mask-sized). Only masked pixels feed the
// tile histograms and only masked pixels are rewritten. Tiles cover the
// mask bounding box; mappings are blended bilinearly between tile centers.
void ApplyClahe(std::vector<double>& lightness, const Mask& mask,
                const ClaheOptions& options);

}  // namespace proxykit
