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

#include "doctest.h"
#include "raisr/error.hpp"
#include "raisr/sharpener.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace raisr;
using raisr::test::Gen;

namespace {

DogConfig single_layer(const Taps& taps, double rho, BlendMode mode) {
  DogConfig cfg;
  cfg.layers = {{taps, rho, mode}};
  return cfg;
}

}  // namespace

TEST_CASE("binomial taps and separable blur") {
  const Taps t = binomial3_taps();
  REQUIRE(t.size() == 3);
  CHECK(t[0] == 0.25);
  CHECK(t[1] == 0.5);
  CHECK(t[2] == 0.25);
  CHECK(separable_gaussian(ImagePlane(9, 7, 42.0), t) == ImagePlane(9, 7, 42.0));

  ImagePlane impulse(9, 9, 0.0);
  impulse(4, 4) = 16;
  const ImagePlane out = separable_gaussian(impulse, t);
  const double w[3] = {1, 2, 1};
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) CHECK(out(4 + i, 4 + j) == w[i + 1] * w[j + 1]);
  CHECK(out(2, 4) == 0.0);
}

TEST_CASE("separable gaussian matches dense 2-D convolution") {
  Gen g(61);
  const ImagePlane p = test::noise_plane(g, 23, 19);
  const int len = 13;
  const Taps t = gaussian_taps(2.0, len);
  const ImagePlane lib = separable_gaussian(p, t);
  const ImagePlane ref = oracle::dense_correlate(p, oracle::gaussian_2d(2.0, len), len);
  double m = 0;
  for (std::size_t i = 0; i < p.size(); ++i) m = std::max(m, std::abs(lib.data()[i] - ref.data()[i]));
  CHECK(m < 1e-9);
}

TEST_CASE("dog_enhance degenerate cases") {
  Gen g(62);
  const ImagePlane fine = test::noise_plane(g, 8, 8), coarse = test::noise_plane(g, 8, 8);
  CHECK(dog_enhance(fine, coarse, 0.0) == fine);
  const ImagePlane c(8, 8, 90.0);
  const ImagePlane flat = dog_enhance(c, c, 55.0);
  for (double v : flat.data()) CHECK(v == doctest::Approx(90.0).epsilon(1e-14));
  for (std::size_t i = 0; i < fine.size(); ++i)
    CHECK(dog_enhance(fine, fine, 7.0).data()[i] == doctest::Approx(fine.data()[i]).epsilon(1e-14));
  CHECK_THROWS_AS(dog_enhance(fine, ImagePlane(7, 8), 1.0), Error);
}

TEST_CASE("sharpen leaves constants and rho zero alone") {
  for (const char* name : {"detail", "contrast"}) {
    const ImagePlane out = sharpen(ImagePlane(20, 20, 131.0), DogConfig::preset(name));
    for (double v : out.data()) CHECK(std::abs(v - 131.0) < 1e-12);
  }
  Gen g(63);
  const ImagePlane p = test::structured_plane(g, 24, 24);
  CHECK(sharpen(p, single_layer(binomial3_taps(), 0.0, BlendMode::None)) == p);
}

TEST_CASE("single unblended layer is the direct DoG") {
  Gen g(64);
  ImagePlane p = test::structured_plane(g, 32, 32);
  // Keep the signal small so the final clamp stays inactive.
  for (double& v : p.data()) v = 128 + (v - 128) * 0.01;
  const ImagePlane b1 = separable_gaussian(p, binomial3_taps());
  const ImagePlane direct = dog_enhance(p, b1, 55.0);
  const ImagePlane out = sharpen(p, single_layer(binomial3_taps(), 55.0, BlendMode::None));
  for (std::size_t i = 0; i < p.size(); ++i) {
    REQUIRE(direct.data()[i] > 0.0);
    REQUIRE(direct.data()[i] < 255.0);
    CHECK(std::abs(out.data()[i] - direct.data()[i]) < 1e-9);
  }
}

TEST_CASE("presets") {
  const DogConfig detail = DogConfig::detail();
  REQUIRE(detail.layers.size() == 3);
  for (const auto& l : detail.layers) {
    CHECK(l.blend == BlendMode::Randomness);
    CHECK(l.rho == 0.55);
  }
  const DogConfig contrast = DogConfig::contrast();
  REQUIRE(contrast.layers.size() == 2);
  CHECK(contrast.layers[1].taps.size() == 65);
  for (const auto& l : contrast.layers) CHECK(l.blend == BlendMode::Hamming);
  CHECK_THROWS_AS(DogConfig::preset("vivid"), Error);
}

TEST_CASE("sharpening raises edge contrast") {
  ImagePlane step(40, 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 40; ++c) step(r, c) = c < 20 ? 80.0 : 160.0;
  const ImagePlane out = sharpen(step, single_layer(binomial3_taps(), 1.0, BlendMode::None));
  CHECK(out(4, 20) > 160.0);
  CHECK(out(4, 19) < 80.0);
  CHECK(out(4, 5) == 80.0);
}

TEST_CASE("config validation") {
  DogConfig cfg;
  CHECK_THROWS_AS(sharpen(ImagePlane(5, 5), cfg), Error);
  cfg = single_layer(binomial3_taps(), -1.0, BlendMode::None);
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = single_layer({0.5, 0.5}, 1.0, BlendMode::None);
  CHECK_THROWS_AS(cfg.validate(), Error);
}
