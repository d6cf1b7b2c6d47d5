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

#pragma once

#include <cstdint>
#include <vector>

#include "raisr/image.hpp"

namespace raisr {

// Census-transform blending.
//
// Each pixel gets an 8-bit descriptor of comparisons against its 3x3
// neighbors. Bits are packed MSB first in the order a,b,c,d,f,g,h,i where the
// neighborhood is laid out column-major:
//
//     a d g
//     b e h
//     c f i
//
// so the string "a b c d f g h i" reads as the binary literal of the byte.

enum class BlendMode { None, Randomness, Hamming };

class CensusMap {
 public:
  CensusMap(int width, int height) : width_(width), height_(height), bits_(std::size_t(width) * height) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::uint8_t operator()(int row, int col) const noexcept { return bits_[std::size_t(row) * width_ + col]; }
  std::uint8_t& operator()(int row, int col) noexcept { return bits_[std::size_t(row) * width_ + col]; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

/// Weight per pixel in [0,1]; 1 selects the filtered image.
using BlendMap = ImagePlane;

/// Linear weight ramps. Randomness: 0 at lcc <= low, 1 at lcc >= high.
/// Hamming: 1 at distance <= low, 0 at distance >= high.
struct BlendRamps {
  double randomness_low = 1.0;
  double randomness_high = 7.0;
  double hamming_low = 0.0;
  double hamming_high = 8.0;
};

/// Bit set iff center > neighbor + threshold. Edge-replicated; needs >= 3x3.
CensusMap census_transform(const ImagePlane& p, double threshold = 4.0);

/// Smallest run of equal bits around the circular ring a,d,g,h,i,f,c,b.
/// A uniform descriptor is a single run of 8.
int lcc_size(std::uint8_t descriptor) noexcept;

BlendMap randomness_map(const CensusMap& ct, const BlendRamps& ramps = {});
BlendMap hamming_map(const CensusMap& ct_initial, const CensusMap& ct_filtered,
                     const BlendRamps& ramps = {});

/// 3x3 box average of the weights (edge-replicated).
BlendMap smooth_blend_map(const BlendMap& map);

/// (1 - w) * initial + w * filtered.
ImagePlane blend(const ImagePlane& initial, const ImagePlane& filtered, const BlendMap& map);

}  // namespace raisr
