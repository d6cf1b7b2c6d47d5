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

#include "raisr/image.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>

#include "raisr/error.hpp"
#include "raisr/image_io.hpp"

namespace raisr {

ImagePlane::ImagePlane(int width, int height, double fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) fail_usage("negative image dimensions");
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

ImagePlane::ImagePlane(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0) fail_usage("negative image dimensions");
  if (data_.size() != static_cast<std::size_t>(width) * height)
    fail_usage("pixel buffer does not match " + std::to_string(width) + "x" + std::to_string(height));
}

ColorImage Raster::color() const {
  if (planes.size() != 3) fail_usage("raster is not RGB");
  return {planes[0], planes[1], planes[2]};
}

Raster Raster::from_color(ColorImage img) {
  Raster r;
  r.planes.push_back(std::move(img.r));
  r.planes.push_back(std::move(img.g));
  r.planes.push_back(std::move(img.b));
  return r;
}

// BT.601 full range (JFIF).
YCbCrPlanes rgb_to_ycbcr(const ColorImage& img) {
  if (!img.r.same_shape(img.g) || !img.r.same_shape(img.b)) fail_usage("color planes differ in size");
  const int w = img.r.width(), h = img.r.height();
  YCbCrPlanes out{ImagePlane(w, h), ImagePlane(w, h), ImagePlane(w, h)};
  for (std::size_t i = 0; i < img.r.size(); ++i) {
    const double r = img.r.data()[i], g = img.g.data()[i], b = img.b.data()[i];
    out.y.data()[i] = 0.299 * r + 0.587 * g + 0.114 * b;
    out.cb.data()[i] = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b;
    out.cr.data()[i] = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b;
  }
  return out;
}

ColorImage ycbcr_to_rgb(const YCbCrPlanes& ycc) {
  if (!ycc.y.same_shape(ycc.cb) || !ycc.y.same_shape(ycc.cr)) fail_usage("YCbCr planes differ in size");
  const int w = ycc.y.width(), h = ycc.y.height();
  ColorImage out{ImagePlane(w, h), ImagePlane(w, h), ImagePlane(w, h)};
  for (std::size_t i = 0; i < ycc.y.size(); ++i) {
    const double y = ycc.y.data()[i], cb = ycc.cb.data()[i] - 128.0, cr = ycc.cr.data()[i] - 128.0;
    out.r.data()[i] = y + 1.402 * cr;
    out.g.data()[i] = y - 0.344136 * cb - 0.714136 * cr;
    out.b.data()[i] = y + 1.772 * cb;
  }
  return out;
}

ImagePlane luma(const Raster& raster) {
  if (raster.planes.empty()) fail_usage("empty raster");
  if (raster.is_gray()) return raster.planes.front();
  return rgb_to_ycbcr(raster.color()).y;
}

double cubic_kernel(double x) noexcept {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

namespace {

struct Contribution {
  std::vector<int> index;
  std::vector<double> weight;
};

double kernel_value(Kernel k, double t) {
  if (k == Kernel::Bilinear) return std::max(0.0, 1.0 - std::abs(t));
  return cubic_kernel(t);
}

// Output sample i sits at input coordinate i * in / out. When shrinking, the
// kernel is stretched by the ratio so it also acts as the anti-alias filter.
std::vector<Contribution> contributions(int in, int out, Kernel k) {
  std::vector<Contribution> result(out);
  const double ratio = double(in) / out;
  const double stretch = std::max(1.0, ratio);
  const double support = (k == Kernel::Bicubic ? 2.0 : 1.0) * stretch;
  const int reach = int(std::ceil(support)) + 1;
  for (int i = 0; i < out; ++i) {
    // x = i * in / out split exactly into base + frac, so equal fractions give
    // bit-identical weights wherever they occur.
    const std::int64_t num = std::int64_t(i) * in;
    const int base = int(num / out);
    const std::int64_t rem = num % out;
    const double frac = double(rem) / out;
    Contribution& c = result[i];
    if (k == Kernel::Nearest) {
      c.index.push_back(std::clamp(base + (2 * rem >= out ? 1 : 0), 0, in - 1));
      c.weight.push_back(1.0);
      continue;
    }
    double sum = 0;
    for (int j = base - reach; j <= base + reach; ++j) {
      const double w = kernel_value(k, ((base - j) + frac) / stretch);
      if (w == 0.0) continue;
      c.index.push_back(std::clamp(j, 0, in - 1));
      c.weight.push_back(w);
      sum += w;
    }
    for (double& w : c.weight) w /= sum;
  }
  return result;
}

}  // namespace

ImagePlane resample(const ImagePlane& p, int out_w, int out_h, Kernel kernel) {
  if (out_w <= 0 || out_h <= 0) fail_usage("resample target must be positive");
  if (p.width() == 0 || p.height() == 0) fail_usage("resample of an empty image");
  const auto cols = contributions(p.width(), out_w, kernel);
  const auto rows = contributions(p.height(), out_h, kernel);

  ImagePlane tmp(out_w, p.height());
  for (int r = 0; r < p.height(); ++r) {
    const auto src = p.row(r);
    auto dst = tmp.row(r);
    for (int c = 0; c < out_w; ++c) {
      const Contribution& k = cols[c];
      double acc = 0;
      for (std::size_t t = 0; t < k.index.size(); ++t) acc += k.weight[t] * src[k.index[t]];
      dst[c] = acc;
    }
  }
  ImagePlane out(out_w, out_h);
  for (int r = 0; r < out_h; ++r) {
    const Contribution& k = rows[r];
    auto dst = out.row(r);
    for (std::size_t t = 0; t < k.index.size(); ++t) {
      const double w = k.weight[t];
      const auto src = tmp.row(k.index[t]);
      for (int c = 0; c < out_w; ++c) dst[c] += w * src[c];
    }
  }
  return out;
}

ImagePlane crop_to_multiple(const ImagePlane& p, int scale) {
  if (scale < 1) fail_usage("scale must be >= 1");
  const int w = p.width() / scale * scale, h = p.height() / scale * scale;
  if (w == p.width() && h == p.height()) return p;
  ImagePlane out(w, h);
  for (int r = 0; r < h; ++r) {
    const auto src = p.row(r);
    std::copy(src.begin(), src.begin() + w, out.row(r).begin());
  }
  return out;
}

ImagePlane clamp_to_range(ImagePlane p) {
  for (double& v : p.data()) v = std::clamp(v, 0.0, 255.0);
  return p;
}

ImagePlane quantize8(ImagePlane p) {
  for (double& v : p.data()) v = std::clamp(std::round(v), 0.0, 255.0);
  return p;
}

ImagePlane degrade(const ImagePlane& hr, const DegradationSpec& spec, const std::filesystem::path& workdir) {
  if (spec.scale < 1) fail_usage("scale must be >= 1");
  const ImagePlane cropped = crop_to_multiple(hr, spec.scale);
  if (cropped.width() == 0 || cropped.height() == 0) fail_usage("image smaller than the scale factor");
  ImagePlane lr = quantize8(
      resample(cropped, cropped.width() / spec.scale, cropped.height() / spec.scale, spec.downscale_kernel));
  if (!spec.codec_quality) return lr;

  const int q = *spec.codec_quality;
  if (q < 0 || q > 100) fail_usage("codec quality must be in [0,100]");
  static std::atomic<unsigned long> counter{0};
  const auto path = workdir / ("raisr_lr_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".jpg");
  Raster r;
  r.planes.push_back(lr);
  write_jpeg(path, r, q);
  Raster back;
  try {
    back = read_image(path);
  } catch (...) {
    std::filesystem::remove(path);
    throw;
  }
  std::filesystem::remove(path);
  return luma(back);
}

double psnr(const ImagePlane& a, const ImagePlane& b) {
  if (!a.same_shape(b)) fail_usage("psnr: image sizes differ");
  if (a.size() == 0) fail_usage("psnr: empty image");
  double sse = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    sse += d * d;
  }
  const double mse = sse / double(a.size());
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse));
}

namespace {

// Valid-region separable filtering with a symmetric kernel.
ImagePlane filter_valid(const ImagePlane& p, const std::vector<double>& k) {
  const int n = int(k.size());
  const int w = p.width() - n + 1, h = p.height() - n + 1;
  ImagePlane tmp(w, p.height());
  for (int r = 0; r < p.height(); ++r) {
    const auto src = p.row(r);
    auto dst = tmp.row(r);
    for (int c = 0; c < w; ++c) {
      double acc = 0;
      for (int t = 0; t < n; ++t) acc += k[t] * src[c + t];
      dst[c] = acc;
    }
  }
  ImagePlane out(w, h);
  for (int r = 0; r < h; ++r) {
    auto dst = out.row(r);
    for (int t = 0; t < n; ++t) {
      const auto src = tmp.row(r + t);
      for (int c = 0; c < w; ++c) dst[c] += k[t] * src[c];
    }
  }
  return out;
}

}  // namespace

double ssim(const ImagePlane& a, const ImagePlane& b) {
  if (!a.same_shape(b)) fail_usage("ssim: image sizes differ");
  if (a.size() == 0) fail_usage("ssim: empty image");
  int n = std::min({11, a.width(), a.height()});
  if (n % 2 == 0) --n;
  std::vector<double> k(n);
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    const double x = i - n / 2;
    k[i] = std::exp(-x * x / (2.0 * 1.5 * 1.5));
    sum += k[i];
  }
  for (double& v : k) v /= sum;

  ImagePlane aa(a.width(), a.height()), bb(a.width(), a.height()), ab(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a.data()[i], y = b.data()[i];
    aa.data()[i] = x * x;
    bb.data()[i] = y * y;
    ab.data()[i] = x * y;
  }
  const ImagePlane mu_a = filter_valid(a, k), mu_b = filter_valid(b, k);
  const ImagePlane e_aa = filter_valid(aa, k), e_bb = filter_valid(bb, k), e_ab = filter_valid(ab, k);

  constexpr double c1 = (0.01 * 255) * (0.01 * 255);
  constexpr double c2 = (0.03 * 255) * (0.03 * 255);
  double total = 0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a.data()[i], mb = mu_b.data()[i];
    const double va = e_aa.data()[i] - ma * ma, vb = e_bb.data()[i] - mb * mb;
    const double cov = e_ab.data()[i] - ma * mb;
    total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return total / double(mu_a.size());
}

}  // namespace raisr
