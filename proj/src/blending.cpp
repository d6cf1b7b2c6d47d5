// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "raisr/blending.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "raisr/error.hpp"

namespace raisr {
namespace {

// (row, col) offsets in descriptor order a,b,c,d,f,g,h,i.
constexpr int kOffsets[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}};

// Bit positions (7 = a ... 0 = i) walked around the ring a,d,g,h,i,f,c,b.
constexpr int kRing[8] = {7, 4, 2, 1, 0, 3, 5, 6};

double ramp(double x, double lo, double hi) {
  if (hi <= lo) return x >= hi ? 1.0 : 0.0;
  return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

}  // namespace

CensusMap census_transform(const ImagePlane& p, double threshold) {
  const int w = p.width(), h = p.height();
  if (w < 3 || h < 3) fail_usage("census transform needs at least 3x3 pixels");
  if (!std::isfinite(threshold)) fail_usage("census threshold must be finite");
  CensusMap ct(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double center = p(r, c);
      std::uint8_t bits = 0;
      for (int k = 0; k < 8; ++k) {
        bits = std::uint8_t(bits << 1);
        if (center > p.clamped(r + kOffsets[k][0], c + kOffsets[k][1]) + threshold) bits |= 1;
      }
      ct(r, c) = bits;
    }
  }
  return ct;
}

int lcc_size(std::uint8_t descriptor) noexcept {
  int ring[8];
  for (int i = 0; i < 8; ++i) ring[i] = (descriptor >> kRing[i]) & 1;
  int start = -1;
  for (int i = 0; i < 8; ++i) {
    if (ring[i] != ring[(i + 7) % 8]) {
      start = i;
      break;
    }
  }
  if (start < 0) return 8;
  int best = 8, run = 0;
  for (int n = 0; n < 8; ++n) {
    const int i = (start + n) % 8;
    if (n > 0 && ring[i] != ring[(i + 7) % 8]) {
      best = std::min(best, run);
      run = 0;
    }
    ++run;
  }
  return std::min(best, run);
}

BlendMap randomness_map(const CensusMap& ct, const BlendRamps& ramps) {
  double lut[256];
  for (int d = 0; d < 256; ++d) lut[d] = ramp(lcc_size(std::uint8_t(d)), ramps.randomness_low, ramps.randomness_high);
  BlendMap map(ct.width(), ct.height());
  for (std::size_t i = 0; i < map.size(); ++i) map.data()[i] = lut[ct.bits()[i]];
  return map;
}

BlendMap hamming_map(const CensusMap& a, const CensusMap& b, const BlendRamps& ramps) {
  if (a.width() != b.width() || a.height() != b.height()) fail_usage("census maps differ in size");
  double lut[9];
  for (int d = 0; d <= 8; ++d) lut[d] = 1.0 - ramp(d, ramps.hamming_low, ramps.hamming_high);
  BlendMap map(a.width(), a.height());
  for (std::size_t i = 0; i < map.size(); ++i)
    map.data()[i] = lut[std::popcount(unsigned(a.bits()[i] ^ b.bits()[i]))];
  return map;
}

BlendMap smooth_blend_map(const BlendMap& map) {
  BlendMap out(map.width(), map.height());
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      double acc = 0;
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) acc += map.clamped(r + dr, c + dc);
      out(r, c) = acc / 9.0;
    }
  }
  return out;
}

ImagePlane blend(const ImagePlane& initial, const ImagePlane& filtered, const BlendMap& map) {
  if (!initial.same_shape(filtered) || !initial.same_shape(map)) fail_usage("blend inputs differ in size");
  ImagePlane out(initial.width(), initial.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double a = initial.data()[i], b = filtered.data()[i];
    // Clamping keeps the result inside [a, b] despite rounding.
    out.data()[i] = std::clamp(a + map.data()[i] * (b - a), std::min(a, b), std::max(a, b));
  }
  return out;
}

}  // namespace raisr
