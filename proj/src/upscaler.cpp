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

#include "raisr/upscaler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "raisr/error.hpp"

namespace raisr {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double l2_norm(const ImagePlane& p) {
  double s = 0;
  for (double v : p.data()) s += v * v;
  return std::sqrt(s);
}

}  // namespace

double filter_pixel(std::span<const double> patch, std::span<const double> taps) noexcept {
  double acc = 0;
  for (std::size_t i = 0; i < taps.size(); ++i) acc += patch[i] * taps[i];
  return acc;
}

ImagePlane apply_filters(const ImagePlane& y, const FilterBank& bank, std::span<const std::int32_t> keys,
                         int threads) {
  const BankConfig& cfg = bank.config();
  if (keys.size() != y.size()) fail_usage("key map does not match image size");
  const int d = cfg.filter_dim, half = d / 2, w = y.width(), h = y.height();
  const int pw = w + 2 * half;

  // Edge-replicated copy so every patch read is in bounds.
  std::vector<double> padded(std::size_t(pw) * (h + 2 * half));
  for (int r = 0; r < h + 2 * half; ++r)
    for (int c = 0; c < pw; ++c) padded[std::size_t(r) * pw + c] = y.clamped(r - half, c - half);

  ImagePlane out(w, h);
  detail::parallel_slices(h, threads, [&](int, int begin, int end) {
    for (int r = begin; r < end; ++r) {
      auto dst = out.row(r);
      for (int c = 0; c < w; ++c) {
        const int key = keys[std::size_t(r) * w + c];
        const double* f = bank.filter(cfg.bucket_index(key, pixel_type(r, c, cfg.scale))).data();
        const double* base = padded.data() + std::size_t(r) * pw + c;
        double acc = 0;
        for (int i = 0; i < d; ++i) {
          const double* src = base + std::size_t(i) * pw;
          const double* taps = f + i * d;
          for (int j = 0; j < d; ++j) acc += src[j] * taps[j];
        }
        dst[c] = acc;
      }
    }
  });
  return out;
}

UpscaleStages upscale_stages(const ImagePlane& lr, const FilterBank& bank, const UpscaleOptions& options) {
  const BankConfig& cfg = bank.config();
  const int s = cfg.scale;
  if (lr.width() == 0 || lr.height() == 0) fail_usage("cannot upscale an empty image");
  // Output must hold one filter footprint and one census neighborhood.
  const int min_side = std::max(cfg.filter_dim, 3);
  if (s * lr.width() < min_side || s * lr.height() < min_side)
    fail_usage("input is too small: scale x side must be at least " + std::to_string(min_side));
  for (double v : lr.data())
    if (!std::isfinite(v)) fail_numeric("input image contains non-finite values");

  StageTimings t;
  auto t0 = Clock::now();
  ImagePlane initial = resample(lr, lr.width() * s, lr.height() * s, options.initial);
  t.initial = seconds_since(t0);

  t0 = Clock::now();
  const auto keys = compute_key_map(initial, cfg.quantizer, options.window);
  t.hashing = seconds_since(t0);

  t0 = Clock::now();
  ImagePlane filtered = apply_filters(initial, bank, keys, options.threads);
  t.filtering = seconds_since(t0);

  t0 = Clock::now();
  BlendMap weights(initial.width(), initial.height(), 1.0);
  ImagePlane blended = filtered;
  if (options.blend != BlendMode::None) {
    const CensusMap ct_initial = census_transform(initial, options.ct_threshold);
    weights = options.blend == BlendMode::Randomness
                  ? randomness_map(ct_initial, options.ramps)
                  : hamming_map(ct_initial, census_transform(filtered, options.ct_threshold), options.ramps);
    if (options.blend_smooth) weights = smooth_blend_map(weights);
    blended = blend(initial, filtered, weights);
  }
  t.blending = seconds_since(t0);

  t0 = Clock::now();
  ImagePlane output = options.back_projection ? back_project(blended, lr, s, *options.back_projection) : blended;
  t.back_projection = seconds_since(t0);

  output = clamp_to_range(std::move(output));
  for (double v : output.data())
    if (!std::isfinite(v)) fail_numeric("upscaler produced non-finite values");
  return {std::move(initial), std::move(filtered), std::move(weights), std::move(blended), std::move(output), t};
}

ImagePlane upscale(const ImagePlane& lr, const FilterBank& bank, const UpscaleOptions& options) {
  return upscale_stages(lr, bank, options).output;
}

ImagePlane back_project(const ImagePlane& estimate, const ImagePlane& lr, int scale, const BackProjection& bp,
                        std::vector<double>* residuals) {
  if (estimate.width() != lr.width() * scale || estimate.height() != lr.height() * scale)
    fail_usage("back-projection estimate must be exactly scale x the LR image");
  if (bp.iterations < 0 || !std::isfinite(bp.step)) fail_usage("invalid back-projection settings");
  ImagePlane x = estimate;
  auto residual = [&]() {
    ImagePlane r = resample(x, lr.width(), lr.height(), Kernel::Bicubic);
    for (std::size_t i = 0; i < r.size(); ++i) r.data()[i] = lr.data()[i] - r.data()[i];
    return r;
  };
  for (int it = 0; it < bp.iterations; ++it) {
    const ImagePlane r = residual();
    if (residuals) residuals->push_back(l2_norm(r));
    const ImagePlane up = resample(r, x.width(), x.height(), Kernel::Bicubic);
    for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] += bp.step * up.data()[i];
  }
  if (residuals) residuals->push_back(l2_norm(residual()));
  return x;
}

Raster upscale_raster(const Raster& lr, const FilterBank& bank, const UpscaleOptions& options,
                      StageTimings* timings) {
  if (lr.planes.empty()) fail_usage("empty image");
  const int s = bank.config().scale;
  if (lr.is_gray()) {
    UpscaleStages st = upscale_stages(lr.planes[0], bank, options);
    if (timings) *timings = st.timings;
    Raster out;
    out.planes.push_back(std::move(st.output));
    return out;
  }
  YCbCrPlanes ycc = rgb_to_ycbcr(lr.color());
  UpscaleStages st = upscale_stages(ycc.y, bank, options);
  if (timings) *timings = st.timings;
  const int w = lr.width() * s, h = lr.height() * s;
  YCbCrPlanes up{std::move(st.output), resample(ycc.cb, w, h, Kernel::Bicubic), resample(ycc.cr, w, h, Kernel::Bicubic)};
  ColorImage rgb = ycbcr_to_rgb(up);
  return Raster::from_color({clamp_to_range(std::move(rgb.r)), clamp_to_range(std::move(rgb.g)),
                             clamp_to_range(std::move(rgb.b))});
}

Raster interpolate_raster(const Raster& lr, int scale, Kernel kernel) {
  if (scale < 1) fail_usage("scale must be >= 1");
  if (lr.planes.empty()) fail_usage("empty image");
  const int w = lr.width() * scale, h = lr.height() * scale;
  if (lr.is_gray()) {
    Raster out;
    out.planes.push_back(clamp_to_range(resample(lr.planes[0], w, h, kernel)));
    return out;
  }
  // Same color path as upscale_raster so that a passthrough bank reproduces it.
  const YCbCrPlanes ycc = rgb_to_ycbcr(lr.color());
  YCbCrPlanes up{clamp_to_range(resample(ycc.y, w, h, kernel)), resample(ycc.cb, w, h, Kernel::Bicubic),
                 resample(ycc.cr, w, h, Kernel::Bicubic)};
  ColorImage rgb = ycbcr_to_rgb(up);
  return Raster::from_color({clamp_to_range(std::move(rgb.r)), clamp_to_range(std::move(rgb.g)),
                             clamp_to_range(std::move(rgb.b))});
}

}  // namespace raisr
