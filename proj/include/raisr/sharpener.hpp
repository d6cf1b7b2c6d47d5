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

#include <string>
#include <vector>

#include "raisr/blending.hpp"
#include "raisr/image.hpp"

namespace raisr {

/// Odd-length normalized 1-D taps.
using Taps = std::vector<double>;

/// [1, 2, 1] / 4, a sigma ~0.85 Gaussian.
Taps binomial3_taps();
/// Sampled Gaussian, renormalized. Length defaults to 2*ceil(3 sigma) + 1.
Taps gaussian_taps(double sigma, int length = 0);

/// Horizontal then vertical pass, edge-replicated.
ImagePlane separable_gaussian(const ImagePlane& p, const Taps& taps);

/// (1 + rho) * fine - rho * coarse.
ImagePlane dog_enhance(const ImagePlane& fine, const ImagePlane& coarse, double rho);

struct DogLayerSpec {
  Taps taps;  // incremental blur applied to the previous layer's smoothed image
  double rho = 0.55;  // gain applied to the band (fine - coarse)
  BlendMode blend = BlendMode::Randomness;

  static DogLayerSpec from_sigma(double sigma, double rho, BlendMode blend);
};

/// Layers run fine to coarse; each blurs the previous layer's output.
struct DogConfig {
  std::vector<DogLayerSpec> layers;
  double ct_threshold = 4.0;
  BlendRamps ramps;

  void validate() const;

  /// Three layers at amount 55% (rho 0.55) whose cumulative blur grows by sqrt(2) per layer,
  /// randomness blending. Used for training targets in SISR mode.
  static DogConfig detail();
  /// Two layers (sigma ~0.85 then 8.5 over 65 taps), rho 0.55, Hamming blending.
  static DogConfig contrast();
  /// "detail" | "contrast"; throws Error(Usage) otherwise.
  static DogConfig preset(const std::string& name);
};

/// Cascaded DoG sharpening with per-layer census blending:
/// out = clamp(p + sum_l w_l * (candidate_l - b_{l-1})).
ImagePlane sharpen(const ImagePlane& p, const DogConfig& cfg);

}  // namespace raisr
