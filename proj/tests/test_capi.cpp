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

// Exercises the shared library through the C header only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "raisr/raisr.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("raisr_capi_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<uint8_t> stripes(int w, int h, int channels, unsigned seed) {
  std::mt19937 eng(seed);
  std::uniform_real_distribution<double> phase(0, 6.28), freq(0.1, 0.6);
  const double p = phase(eng), f = freq(eng);
  std::vector<uint8_t> px(std::size_t(w) * h * channels);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      for (int ch = 0; ch < channels; ++ch)
        px[(std::size_t(r) * w + c) * channels + ch] = uint8_t(128 + 90 * std::sin(f * (c + 0.7 * r) + p + ch));
  return px;
}

raisr_image* make_image(int w, int h, int channels, unsigned seed) {
  raisr_image* img = nullptr;
  const auto px = stripes(w, h, channels, seed);
  REQUIRE(raisr_image_from_u8(px.data(), w, h, channels, &img) == RAISR_OK);
  return img;
}

// Small corpus on disk and a bank trained on it.
struct Fixture {
  fs::path dir = scratch_dir("corpus");
  raisr_bank* bank = nullptr;

  Fixture() {
    for (unsigned i = 0; i < 4; ++i) {
      raisr_image* img = make_image(40, 40, 1, i);
      REQUIRE(raisr_image_save(img, (dir / ("img" + std::to_string(i) + ".png")).c_str()) == RAISR_OK);
      raisr_image_free(img);
    }
    raisr_train_options opts;
    raisr_train_options_init(&opts, RAISR_MODE_SISR);
    opts.filter_dim = 5;
    opts.angle_bins = 8;
    REQUIRE(raisr_train(dir.c_str(), &opts, &bank, nullptr) == RAISR_OK);
  }
  ~Fixture() { raisr_bank_free(bank); }
};

}  // namespace

TEST_CASE("version and error strings") {
  CHECK(std::strlen(raisr_version()) > 0);
  raisr_image* img = nullptr;
  CHECK(raisr_image_load("/nonexistent/file.png", &img) == RAISR_ERR_IO);
  CHECK(img == nullptr);
  CHECK(std::strlen(raisr_last_error()) > 0);
  CHECK(raisr_image_load(nullptr, &img) == RAISR_ERR_USAGE);
}

TEST_CASE("image round trip through u8 buffers and files") {
  const auto px = stripes(7, 5, 3, 1);
  raisr_image* img = nullptr;
  REQUIRE(raisr_image_from_u8(px.data(), 7, 5, 3, &img) == RAISR_OK);
  CHECK(raisr_image_width(img) == 7);
  CHECK(raisr_image_height(img) == 5);
  CHECK(raisr_image_channels(img) == 3);
  std::vector<uint8_t> back(px.size());
  CHECK(raisr_image_to_u8(img, back.data(), back.size() - 1) == RAISR_ERR_USAGE);
  REQUIRE(raisr_image_to_u8(img, back.data(), back.size()) == RAISR_OK);
  CHECK(back == px);

  const auto path = scratch_dir("io") / "img.ppm";
  REQUIRE(raisr_image_save(img, path.c_str()) == RAISR_OK);
  raisr_image* loaded = nullptr;
  REQUIRE(raisr_image_load(path.c_str(), &loaded) == RAISR_OK);
  std::vector<uint8_t> again(px.size());
  REQUIRE(raisr_image_to_u8(loaded, again.data(), again.size()) == RAISR_OK);
  CHECK(again == px);
  raisr_image_free(loaded);
  raisr_image_free(img);
  CHECK(raisr_image_from_u8(px.data(), 7, 5, 2, &img) == RAISR_ERR_USAGE);
}

TEST_CASE("train, save, load and upscale") {
  Fixture f;
  raisr_bank_info info;
  REQUIRE(raisr_bank_info_get(f.bank, &info) == RAISR_OK);
  CHECK(info.scale == 2);
  CHECK(info.filter_dim == 5);
  CHECK(info.angle_bins == 8);
  CHECK(info.pixel_types == 4);

  const auto path = scratch_dir("bank") / "bank.bin";
  REQUIRE(raisr_bank_save(f.bank, path.c_str()) == RAISR_OK);
  raisr_bank* loaded = nullptr;
  REQUIRE(raisr_bank_load(path.c_str(), &loaded) == RAISR_OK);

  raisr_image* lr = make_image(20, 14, 3, 9);
  raisr_upscale_options opts;
  raisr_upscale_options_init(&opts, RAISR_MODE_SISR);
  raisr_image *a = nullptr, *b = nullptr;
  raisr_timings t;
  REQUIRE(raisr_upscale(lr, f.bank, &opts, &a, &t) == RAISR_OK);
  REQUIRE(raisr_upscale(lr, loaded, &opts, &b, nullptr) == RAISR_OK);
  CHECK(raisr_image_width(a) == 40);
  CHECK(raisr_image_height(a) == 28);
  CHECK(raisr_image_channels(a) == 3);
  CHECK(t.filtering >= 0);
  std::vector<uint8_t> pa(40 * 28 * 3), pb(pa.size());
  raisr_image_to_u8(a, pa.data(), pa.size());
  raisr_image_to_u8(b, pb.data(), pb.size());
  CHECK(pa == pb);

  raisr_image* map = nullptr;
  REQUIRE(raisr_blend_map(lr, f.bank, &opts, &map) == RAISR_OK);
  CHECK(raisr_image_channels(map) == 1);
  CHECK(raisr_image_width(map) == 40);

  raisr_image_free(map);
  raisr_image_free(a);
  raisr_image_free(b);
  raisr_image_free(lr);
  raisr_bank_free(loaded);
}

TEST_CASE("training reports and errors") {
  const auto dir = scratch_dir("train");
  raisr_image* img = make_image(32, 32, 1, 3);
  REQUIRE(raisr_image_save(img, (dir / "a.png").c_str()) == RAISR_OK);
  raisr_image_free(img);
  raisr_train_options opts;
  raisr_train_options_init(&opts, RAISR_MODE_ENHANCE);
  CHECK(opts.initial == RAISR_BILINEAR);
  CHECK(opts.compress_quality == 85);
  opts.filter_dim = 3;
  opts.angle_bins = 4;
  opts.workdir = dir.c_str();
  raisr_bank* bank = nullptr;
  char* report = nullptr;
  REQUIRE(raisr_train(dir.c_str(), &opts, &bank, &report) == RAISR_OK);
  REQUIRE(report != nullptr);
  CHECK(std::string(report).find("raisr-train-report/1") != std::string::npos);
  raisr_string_free(report);
  raisr_bank_free(bank);

  opts.filter_dim = 4;
  CHECK(raisr_train(dir.c_str(), &opts, &bank, nullptr) == RAISR_ERR_USAGE);
  opts.filter_dim = 3;
  opts.angle_bins = 6;  // symmetry needs a multiple of 4
  CHECK(raisr_train(dir.c_str(), &opts, &bank, nullptr) == RAISR_ERR_USAGE);
  opts.symmetry = 0;
  opts.sharpen = "unknown";
  CHECK(raisr_train(dir.c_str(), &opts, &bank, nullptr) == RAISR_ERR_USAGE);
  opts.sharpen = nullptr;
  CHECK(raisr_train((dir / "missing").c_str(), &opts, &bank, nullptr) == RAISR_ERR_IO);
}

TEST_CASE("interpolate, sharpen, evaluate and dump") {
  Fixture f;
  raisr_image* lr = make_image(16, 12, 1, 4);
  raisr_image* up = nullptr;
  REQUIRE(raisr_interpolate(lr, 3, RAISR_BICUBIC, &up) == RAISR_OK);
  CHECK(raisr_image_width(up) == 48);
  raisr_image_free(up);

  raisr_image* sharp = nullptr;
  REQUIRE(raisr_sharpen(lr, "detail", nullptr, 4.0, &sharp) == RAISR_OK);
  raisr_image_free(sharp);
  REQUIRE(raisr_sharpen(lr, nullptr, "1:0.5:none", 4.0, &sharp) == RAISR_OK);
  raisr_image_free(sharp);
  CHECK(raisr_sharpen(lr, "detail", "1:0.5:none", 4.0, &sharp) == RAISR_ERR_USAGE);
  CHECK(raisr_sharpen(lr, nullptr, "1:0.5", 4.0, &sharp) == RAISR_ERR_USAGE);
  raisr_image_free(lr);

  raisr_upscale_options opts;
  raisr_upscale_options_init(&opts, RAISR_MODE_SISR);
  char *json = nullptr, *table = nullptr;
  REQUIRE(raisr_evaluate(f.dir.c_str(), nullptr, f.bank, &opts, &json, &table) == RAISR_OK);
  CHECK(std::string(json).find("raisr-eval-report/1") != std::string::npos);
  CHECK(std::string(table).find("mean") != std::string::npos);
  raisr_string_free(json);
  raisr_string_free(table);

  const auto out = scratch_dir("dump");
  REQUIRE(raisr_dump_filters(f.bank, (out / "grid.png").c_str()) == RAISR_OK);
  for (int t = 0; t < 4; ++t) {
    raisr_image* grid = nullptr;
    REQUIRE(raisr_image_load((out / ("grid_t" + std::to_string(t) + ".png")).c_str(), &grid) == RAISR_OK);
    CHECK(raisr_image_width(grid) == 8 * 5);
    CHECK(raisr_image_height(grid) == 3 * 3 * 5);
    raisr_image_free(grid);
  }
}

TEST_CASE("upscale rejects a null bank") {
  raisr_image* lr = make_image(8, 8, 1, 5);
  raisr_image* out = nullptr;
  CHECK(raisr_upscale(lr, nullptr, nullptr, &out, nullptr) == RAISR_ERR_USAGE);
  raisr_image_free(lr);
}
