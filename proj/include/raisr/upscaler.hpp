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
#include <optional>
#include <span>
#include <vector>

#include "raisr/blending.hpp"
#include "raisr/filter_bank.hpp"
#include "raisr/hashing.hpp"
#include "raisr/image.hpp"

namespace raisr {

/// Lattice phase of an HR pixel: (row mod s) * s + (col mod s).
inline int pixel_type(int row, int col, int scale) noexcept {
  return (row % scale) * scale + (col % scale);
}

double filter_pixel(std::span<const double> patch, std::span<const double> taps) noexcept;

struct BackProjection {
  int iterations = 10;
  double step = 1.0;
};

struct UpscaleOptions {
  Kernel initial = Kernel::Bicubic;
  BlendMode blend = BlendMode::Randomness;
  double ct_threshold = 4.0;
  bool blend_smooth = false;
  BlendRamps ramps;
  std::optional<BackProjection> back_projection;
  HashWindow window;
  int threads = 1;
};

struct StageTimings {
  double initial = 0, hashing = 0, filtering = 0, blending = 0, back_projection = 0;  // seconds
  double total() const noexcept { return initial + hashing + filtering + blending + back_projection; }
};

struct UpscaleStages {
  ImagePlane initial;   // cheap interpolation y
  ImagePlane filtered;  // hashed filters applied to y
  BlendMap weights;     // 1 everywhere for BlendMode::None
  ImagePlane blended;   // before back-projection and clamping
  ImagePlane output;    // final, clamped to [0,255]
  StageTimings timings;
};

/// Applies the bank per pixel given a precomputed key map of `y`.
ImagePlane apply_filters(const ImagePlane& y, const FilterBank& bank,
                         std::span<const std::int32_t> keys, int threads = 1);

UpscaleStages upscale_stages(const ImagePlane& lr, const FilterBank& bank, const UpscaleOptions& options = {});
ImagePlane upscale(const ImagePlane& lr, const FilterBank& bank, const UpscaleOptions& options = {});

/// Iterates x <- x + step * U(z - D(x)) with bicubic D (downscale by s) and
/// U (upscale by s). When `residuals` is given it receives ||z - D(x)|| before
/// each iteration and after the last one.
ImagePlane back_project(const ImagePlane& estimate, const ImagePlane& lr, int scale,
                        const BackProjection& bp = {}, std::vector<double>* residuals = nullptr);

/// Luma through the bank, chroma bicubic. Gray rasters skip color conversion.
Raster upscale_raster(const Raster& lr, const FilterBank& bank, const UpscaleOptions& options,
                      StageTimings* timings = nullptr);

/// Cheap interpolation of luma (chroma bicubic, as in upscale_raster), clamped.
Raster interpolate_raster(const Raster& lr, int scale, Kernel kernel);

}  // namespace raisr
