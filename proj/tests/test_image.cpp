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

#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "raisr/error.hpp"
#include "raisr/image.hpp"
#include "raisr/image_io.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace raisr;
using raisr::test::Gen;

namespace {

double max_abs_diff(const ImagePlane& a, const ImagePlane& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

std::filesystem::path scratch_dir(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / ("raisr_test_" + std::string(name));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("gray and black map to the neutral chroma point") {
  for (double v : {0.0, 17.0, 128.0, 255.0}) {
    ColorImage img{ImagePlane(2, 2, v), ImagePlane(2, 2, v), ImagePlane(2, 2, v)};
    const YCbCrPlanes ycc = rgb_to_ycbcr(img);
    CHECK(ycc.y(0, 0) == doctest::Approx(v).epsilon(1e-12));
    CHECK(ycc.cb(1, 1) == doctest::Approx(128.0).epsilon(1e-12));
    CHECK(ycc.cr(1, 0) == doctest::Approx(128.0).epsilon(1e-12));
  }
}

TEST_CASE("rgb to ycbcr round trip stays within one level") {
  // Dense sample of the cube: every 5th value on each axis plus the corners.
  std::vector<double> axis;
  for (int v = 0; v <= 255; v += 5) axis.push_back(v);
  const int n = int(axis.size());
  ColorImage img{ImagePlane(n * n, n), ImagePlane(n * n, n), ImagePlane(n * n, n)};
  for (int r = 0; r < n; ++r)
    for (int g = 0; g < n; ++g)
      for (int b = 0; b < n; ++b) {
        img.r(r, g * n + b) = axis[r];
        img.g(r, g * n + b) = axis[g];
        img.b(r, g * n + b) = axis[b];
      }
  YCbCrPlanes ycc = rgb_to_ycbcr(img);
  ycc.y = quantize8(ycc.y);
  ycc.cb = quantize8(ycc.cb);
  ycc.cr = quantize8(ycc.cr);
  const ColorImage back = ycbcr_to_rgb(ycc);
  CHECK(max_abs_diff(quantize8(back.r), img.r) <= 1.0);
  CHECK(max_abs_diff(quantize8(back.g), img.g) <= 1.0);
  CHECK(max_abs_diff(quantize8(back.b), img.b) <= 1.0);
}

TEST_CASE("resample reproduces constants") {
  for (Kernel k : {Kernel::Nearest, Kernel::Bilinear, Kernel::Bicubic}) {
    const ImagePlane out = resample(ImagePlane(7, 5, 100.0), 13, 22, k);
    CHECK(out.width() == 13);
    CHECK(out.height() == 22);
    for (double v : out.data()) CHECK(v == doctest::Approx(100.0).epsilon(1e-12));
  }
}

TEST_CASE("bilinear 2x places the average of four samples between them") {
  const ImagePlane p(2, 2, std::vector<double>{0, 10, 20, 30});
  const ImagePlane up = resample(p, 4, 4, Kernel::Bilinear);
  CHECK(up(1, 1) == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(up(0, 0) == 0.0);
  CHECK(up(0, 2) == 10.0);
  CHECK(up(2, 0) == 20.0);
  CHECK(up(2, 2) == 30.0);
}

TEST_CASE("resample matches the dense matrix reference") {
  Gen g(11);
  for (int trial = 0; trial < 40; ++trial) {
    const ImagePlane p = test::random_plane(g, g.integer(1, 20), g.integer(1, 20));
    const int ow = g.integer(1, 40), oh = g.integer(1, 40);
    for (Kernel k : {Kernel::Nearest, Kernel::Bilinear, Kernel::Bicubic})
      CHECK(max_abs_diff(resample(p, ow, oh, k), oracle::dense_resample(p, ow, oh, k)) < 1e-9);
  }
}

TEST_CASE("bicubic down-up PSNR agrees with the reference resampler") {
  ImagePlane p(64, 64);
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c) p(r, c) = 128 + 60 * std::sin(0.21 * r) * std::cos(0.13 * c + 0.4 * r);
  const ImagePlane lib = resample(resample(p, 32, 32, Kernel::Bicubic), 64, 64, Kernel::Bicubic);
  const ImagePlane ref = oracle::dense_resample(oracle::dense_resample(p, 32, 32, Kernel::Bicubic), 64, 64, Kernel::Bicubic);
  CHECK(std::abs(psnr(lib, p) - psnr(ref, p)) < 0.01);
}

TEST_CASE("resample rejects empty targets") {
  CHECK_THROWS_AS(resample(ImagePlane(3, 3), 0, 4, Kernel::Bicubic), Error);
}

TEST_CASE("degrade halves a constant plane") {
  const ImagePlane lr = degrade(ImagePlane(16, 12, 128.0), {2, Kernel::Bicubic, std::nullopt});
  CHECK(lr.width() == 8);
  CHECK(lr.height() == 6);
  for (double v : lr.data()) CHECK(v == 128.0);
}

TEST_CASE("degrade of a checkerboard equals the rounded reference downscale") {
  ImagePlane p(64, 64);
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c) p(r, c) = ((r / 4 + c / 4) % 2) ? 230.0 : 20.0;
  const ImagePlane lr = degrade(p, {2, Kernel::Bicubic, std::nullopt});
  ImagePlane ref = oracle::dense_resample(p, 32, 32, Kernel::Bicubic);
  for (double& v : ref.data()) v = std::clamp(std::round(v), 0.0, 255.0);
  CHECK(lr == ref);
}

TEST_CASE("degrade with near-lossless JPEG stays close to the codec-free result") {
  Gen g(5);
  const ImagePlane hr = test::structured_plane(g, 96, 96);
  const auto dir = scratch_dir("degrade");
  const ImagePlane plain = degrade(hr, {2, Kernel::Bicubic, std::nullopt}, dir);
  const ImagePlane coded = degrade(hr, {2, Kernel::Bicubic, 100}, dir);
  CHECK(psnr(plain, coded) >= 45.0);
  CHECK(std::filesystem::is_empty(dir));
}

TEST_CASE("degrade crops to a multiple of the scale") {
  const ImagePlane lr = degrade(ImagePlane(17, 10, 50.0), {3, Kernel::Bicubic, std::nullopt});
  CHECK(lr.width() == 5);
  CHECK(lr.height() == 3);
}

TEST_CASE("psnr reference values") {
  const ImagePlane a(8, 8, 100.0);
  CHECK(psnr(a, a) == kPsnrCap);
  CHECK(psnr(a, ImagePlane(8, 8, 101.0)) == doctest::Approx(48.1308).epsilon(1e-5));
  CHECK(std::abs(psnr(ImagePlane(8, 8, 0.0), ImagePlane(8, 8, 255.0))) < 1e-9);
}

TEST_CASE("ssim reference values") {
  Gen g(3);
  const ImagePlane a = test::structured_plane(g, 40, 32);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));

  ImagePlane checker(32, 32);
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c) checker(r, c) = ((r / 3 + c / 3) % 2) ? 240.0 : 10.0;
  ImagePlane negative = checker;
  for (double& v : negative.data()) v = 255 - v;
  CHECK(ssim(checker, negative) < 0.0);

  ImagePlane noisy = a;
  for (double& v : noisy.data()) v = std::clamp(v + g.normal(0, 12), 0.0, 255.0);
  CHECK(std::abs(ssim(a, noisy) - oracle::naive_ssim(a, noisy)) < 1e-6);
}

TEST_CASE("image files round trip") {
  Gen g(9);
  const auto dir = scratch_dir("io");
  const ImagePlane gray = test::noise_plane(g, 13, 7);
  for (const char* ext : {".png", ".pgm"}) {
    const auto path = dir / (std::string("gray") + ext);
    write_image(path, gray);
    const Raster back = read_image(path);
    REQUIRE(back.is_gray());
    CHECK(back.planes[0] == gray);
  }
  const Raster color = Raster::from_color({test::noise_plane(g, 9, 6), test::noise_plane(g, 9, 6), test::noise_plane(g, 9, 6)});
  for (const char* ext : {".png", ".ppm"}) {
    const auto path = dir / (std::string("color") + ext);
    write_image(path, color);
    const Raster back = read_image(path);
    REQUIRE(back.planes.size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(back.planes[k] == color.planes[k]);
  }
  const auto jpg = dir / "color.jpg";
  write_jpeg(jpg, color, 90);
  const Raster back = read_image(jpg);
  CHECK(back.width() == 9);
  CHECK(back.height() == 6);
}

TEST_CASE("reading a missing or corrupt file is an IO error") {
  const auto dir = scratch_dir("io_bad");
  try {
    read_image(dir / "missing.png");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
  const auto bad = dir / "bad.png";
  { std::ofstream(bad) << "not a png"; }
  try {
    read_image(bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}
