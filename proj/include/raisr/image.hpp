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

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace raisr {

/// Single-channel row-major image of double intensities, nominally in [0,255].
///
/// Dimensions are always at least 1x1. Values are not range-checked: filtered
/// intermediates may overshoot, and callers clamp where the pipeline says so.
class ImagePlane {
 public:
  ImagePlane(int width, int height, double fill = 0.0);
  ImagePlane(int width, int height, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(int row, int col) const noexcept { return data_[index(row, col)]; }
  double& operator()(int row, int col) noexcept { return data_[index(row, col)]; }

  /// Edge-replicated read: out-of-range coordinates are clamped to the border.
  double clamped(int row, int col) const noexcept {
    return data_[index(std::clamp(row, 0, height_ - 1), std::clamp(col, 0, width_ - 1))];
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> row(int r) const noexcept {
    return {data_.data() + static_cast<std::size_t>(r) * width_, static_cast<std::size_t>(width_)};
  }
  std::span<double> row(int r) noexcept {
    return {data_.data() + static_cast<std::size_t>(r) * width_, static_cast<std::size_t>(width_)};
  }

  bool same_shape(const ImagePlane& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

 private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  int width_;
  int height_;
  std::vector<double> data_;
};

/// Three same-sized planes holding R, G and B.
struct ColorImage {
  ImagePlane r, g, b;
};

struct YCbCrPlanes {
  ImagePlane y, cb, cr;
};

/// A decoded image file: one plane (gray) or three (RGB).
struct Raster {
  std::vector<ImagePlane> planes;

  bool is_gray() const noexcept { return planes.size() == 1; }
  int width() const { return planes.front().width(); }
  int height() const { return planes.front().height(); }
  ColorImage color() const;
  static Raster from_color(ColorImage img);
};

enum class Kernel { Nearest, Bilinear, Bicubic };

/// Full-range BT.601.
YCbCrPlanes rgb_to_ycbcr(const ColorImage& img);
ColorImage ycbcr_to_rgb(const YCbCrPlanes& ycc);

/// Luma of a raster: the plane itself for gray input.
ImagePlane luma(const Raster& raster);

/// Separable resampling to exactly out_w x out_h.
///
/// Sample positions are anchored at the top-left pixel: output index i reads
/// input coordinate i * in/out, so an integer upscale by s places input pixel j
/// at output pixel s*j and an integer downscale by s centers output pixel j on
/// input pixel s*j. Downscaling widens the kernel by the ratio (antialiasing).
/// Borders are edge-replicated and weights always sum to one.
ImagePlane resample(const ImagePlane& p, int out_w, int out_h, Kernel kernel);

/// Keys cubic convolution kernel with a = -0.5.
double cubic_kernel(double x) noexcept;

struct DegradationSpec {
  int scale = 2;
  Kernel downscale_kernel = Kernel::Bicubic;
  std::optional<int> codec_quality;  // JPEG quality 0..100
};

/// Largest top-left region whose sides are multiples of `scale`.
ImagePlane crop_to_multiple(const ImagePlane& p, int scale);

/// Crops to a multiple of the scale, downsamples, rounds to the 8-bit grid and,
/// when a codec quality is set, round-trips the result through a JPEG file in
/// `workdir`.
ImagePlane degrade(const ImagePlane& hr, const DegradationSpec& spec,
                   const std::filesystem::path& workdir = std::filesystem::temp_directory_path());

/// Clamp to [0,255].
ImagePlane clamp_to_range(ImagePlane p);
/// Clamp to [0,255] and round to integers.
ImagePlane quantize8(ImagePlane p);

constexpr double kPsnrCap = 99.0;

/// 10 log10(255^2 / MSE), capped at kPsnrCap (returned for identical planes).
double psnr(const ImagePlane& a, const ImagePlane& b);

/// Mean SSIM over all valid 11x11 Gaussian windows (sigma 1.5).
double ssim(const ImagePlane& a, const ImagePlane& b);

}  // namespace raisr
