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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "raisr/error.hpp"
#include "raisr/image_io.hpp"
#include "raisr/pipeline.hpp"
#include "raisr/raisr.h"

struct raisr_image {
  raisr::Raster raster;
};

struct raisr_bank {
  raisr::FilterBank bank;
};

namespace {

thread_local std::string g_last_error;

raisr_status set_error(raisr_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn and converts exceptions into status codes.
template <class Fn>
raisr_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return RAISR_OK;
  } catch (const raisr::Error& e) {
    switch (e.kind()) {
      case raisr::ErrorKind::Usage: return set_error(RAISR_ERR_USAGE, e.what());
      case raisr::ErrorKind::Io: return set_error(RAISR_ERR_IO, e.what());
      case raisr::ErrorKind::Numeric: return set_error(RAISR_ERR_NUMERIC, e.what());
    }
    return set_error(RAISR_ERR_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(RAISR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(RAISR_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(RAISR_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) raisr::fail_usage(what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

raisr::Kernel to_kernel(raisr_kernel k) {
  switch (k) {
    case RAISR_NEAREST: return raisr::Kernel::Nearest;
    case RAISR_BILINEAR: return raisr::Kernel::Bilinear;
    case RAISR_BICUBIC: return raisr::Kernel::Bicubic;
  }
  raisr::fail_usage("invalid kernel");
}

raisr_kernel from_kernel(raisr::Kernel k) {
  switch (k) {
    case raisr::Kernel::Nearest: return RAISR_NEAREST;
    case raisr::Kernel::Bilinear: return RAISR_BILINEAR;
    case raisr::Kernel::Bicubic: return RAISR_BICUBIC;
  }
  return RAISR_BICUBIC;
}

raisr::BlendMode to_blend(raisr_blend b) {
  switch (b) {
    case RAISR_BLEND_NONE: return raisr::BlendMode::None;
    case RAISR_BLEND_RANDOMNESS: return raisr::BlendMode::Randomness;
    case RAISR_BLEND_HAMMING: return raisr::BlendMode::Hamming;
  }
  raisr::fail_usage("invalid blend mode");
}

raisr_blend from_blend(raisr::BlendMode b) {
  switch (b) {
    case raisr::BlendMode::None: return RAISR_BLEND_NONE;
    case raisr::BlendMode::Randomness: return RAISR_BLEND_RANDOMNESS;
    case raisr::BlendMode::Hamming: return RAISR_BLEND_HAMMING;
  }
  return RAISR_BLEND_NONE;
}

raisr::PipelineMode to_mode(raisr_mode m) {
  return m == RAISR_MODE_ENHANCE ? raisr::PipelineMode::Enhance : raisr::PipelineMode::Sisr;
}

raisr::UpscaleOptions to_options(const raisr_upscale_options* o) {
  require(o != nullptr, "null upscale options");
  raisr::UpscaleOptions out;
  out.initial = to_kernel(o->initial);
  out.blend = to_blend(o->blend);
  out.ct_threshold = o->ct_threshold;
  out.blend_smooth = o->blend_smooth != 0;
  require(o->back_projection_iters >= 0, "back-projection iterations must be >= 0");
  if (o->back_projection_iters > 0) out.back_projection = raisr::BackProjection{o->back_projection_iters, o->back_projection_step};
  require(o->threads >= 1, "threads must be >= 1");
  out.threads = o->threads;
  return out;
}

}  // namespace

extern "C" {

const char* raisr_last_error(void) { return g_last_error.c_str(); }

const char* raisr_version(void) { return "1.0.0"; }

void raisr_string_free(char* s) { std::free(s); }

raisr_status raisr_image_load(const char* path, raisr_image** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new raisr_image{raisr::read_image(path)};
  });
}

raisr_status raisr_image_save(const raisr_image* img, const char* path) {
  return guarded([&] {
    require(img && path, "null argument");
    raisr::write_image(path, img->raster);
  });
}

raisr_status raisr_image_from_u8(const uint8_t* pixels, int width, int height, int channels, raisr_image** out) {
  return guarded([&] {
    require(pixels && out, "null argument");
    require(width > 0 && height > 0, "dimensions must be positive");
    require(channels == 1 || channels == 3, "channels must be 1 or 3");
    raisr::Raster r;
    for (int ch = 0; ch < channels; ++ch) {
      raisr::ImagePlane p(width, height);
      for (std::size_t i = 0; i < p.size(); ++i) p.data()[i] = pixels[i * channels + ch];
      r.planes.push_back(std::move(p));
    }
    *out = new raisr_image{std::move(r)};
  });
}

raisr_status raisr_image_to_u8(const raisr_image* img, uint8_t* pixels, size_t capacity) {
  return guarded([&] {
    require(img && pixels, "null argument");
    const std::size_t channels = img->raster.planes.size();
    const std::size_t n = img->raster.planes.front().size();
    require(capacity >= n * channels, "buffer too small");
    for (std::size_t ch = 0; ch < channels; ++ch)
      for (std::size_t i = 0; i < n; ++i)
        pixels[i * channels + ch] =
            static_cast<uint8_t>(std::clamp(std::round(img->raster.planes[ch].data()[i]), 0.0, 255.0));
  });
}

void raisr_image_free(raisr_image* img) { delete img; }
int raisr_image_width(const raisr_image* img) { return img ? img->raster.width() : 0; }
int raisr_image_height(const raisr_image* img) { return img ? img->raster.height() : 0; }
int raisr_image_channels(const raisr_image* img) { return img ? int(img->raster.planes.size()) : 0; }

raisr_status raisr_bank_load(const char* path, raisr_bank** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new raisr_bank{raisr::load_bank(path)};
  });
}

raisr_status raisr_bank_save(const raisr_bank* bank, const char* path) {
  return guarded([&] {
    require(bank && path, "null argument");
    raisr::save_bank(bank->bank, path);
  });
}

raisr_status raisr_bank_info_get(const raisr_bank* bank, raisr_bank_info* out) {
  return guarded([&] {
    require(bank && out, "null argument");
    const auto& c = bank->bank.config();
    *out = {c.scale, c.filter_dim, c.quantizer.angle_bins, c.quantizer.strength_bins, c.quantizer.coherence_bins,
            c.pixel_types()};
  });
}

void raisr_bank_free(raisr_bank* bank) { delete bank; }

void raisr_train_options_init(raisr_train_options* opts, raisr_mode mode) {
  if (!opts) return;
  const raisr::TrainConfig cfg = raisr::TrainConfig::for_mode(to_mode(mode));
  *opts = raisr_train_options{};
  opts->scale = cfg.bank.scale;
  opts->filter_dim = cfg.bank.filter_dim;
  opts->angle_bins = cfg.bank.quantizer.angle_bins;
  opts->strength_bins = cfg.bank.quantizer.strength_bins;
  opts->coherence_bins = cfg.bank.quantizer.coherence_bins;
  for (std::size_t i = 0; i < cfg.bank.quantizer.strength_thresholds.size(); ++i)
    opts->strength_thresholds[i] = cfg.bank.quantizer.strength_thresholds[i];
  for (std::size_t i = 0; i < cfg.bank.quantizer.coherence_thresholds.size(); ++i)
    opts->coherence_thresholds[i] = cfg.bank.quantizer.coherence_thresholds[i];
  opts->stride = cfg.stride;
  opts->ridge = cfg.ridge;
  opts->symmetry = cfg.symmetry ? 1 : 0;
  // Preset names are string literals with static storage.
  opts->sharpen = cfg.sharpen_targets ? (*cfg.sharpen_targets == "detail" ? "detail" : "contrast") : nullptr;
  opts->compress_quality = cfg.compress_lr ? *cfg.compress_lr : -1;
  opts->initial = from_kernel(cfg.initial);
  opts->threads = cfg.threads;
  opts->workdir = nullptr;
}

raisr_status raisr_train(const char* corpus_dir, const raisr_train_options* opts, raisr_bank** out,
                         char** report_json) {
  return guarded([&] {
    require(corpus_dir && opts && out, "null argument");
    require(opts->strength_bins >= 1 && opts->strength_bins - 1 <= RAISR_MAX_THRESHOLDS, "strength bins out of range");
    require(opts->coherence_bins >= 1 && opts->coherence_bins - 1 <= RAISR_MAX_THRESHOLDS,
            "coherence bins out of range");
    raisr::TrainConfig cfg;
    cfg.corpus = corpus_dir;
    cfg.bank.scale = opts->scale;
    cfg.bank.filter_dim = opts->filter_dim;
    cfg.bank.quantizer.angle_bins = opts->angle_bins;
    cfg.bank.quantizer.strength_bins = opts->strength_bins;
    cfg.bank.quantizer.coherence_bins = opts->coherence_bins;
    cfg.bank.quantizer.strength_thresholds.assign(opts->strength_thresholds,
                                                  opts->strength_thresholds + opts->strength_bins - 1);
    cfg.bank.quantizer.coherence_thresholds.assign(opts->coherence_thresholds,
                                                   opts->coherence_thresholds + opts->coherence_bins - 1);
    cfg.stride = opts->stride;
    cfg.ridge = opts->ridge;
    cfg.symmetry = opts->symmetry != 0;
    cfg.sharpen_targets = opts->sharpen ? std::optional<std::string>(opts->sharpen) : std::nullopt;
    cfg.compress_lr = opts->compress_quality >= 0 ? std::optional<int>(opts->compress_quality) : std::nullopt;
    cfg.initial = to_kernel(opts->initial);
    cfg.threads = opts->threads;
    if (opts->workdir) cfg.workdir = opts->workdir;
    raisr::TrainResult result = raisr::train(cfg);
    char* json = report_json ? dup_string(result.report.to_json(cfg)) : nullptr;
    *out = new raisr_bank{std::move(result.bank)};
    if (report_json) *report_json = json;
  });
}

void raisr_upscale_options_init(raisr_upscale_options* opts, raisr_mode mode) {
  if (!opts) return;
  const raisr::UpscaleOptions o = raisr::upscale_options_for(to_mode(mode));
  opts->initial = from_kernel(o.initial);
  opts->blend = from_blend(o.blend);
  opts->ct_threshold = o.ct_threshold;
  opts->blend_smooth = o.blend_smooth ? 1 : 0;
  opts->back_projection_iters = o.back_projection ? o.back_projection->iterations : 0;
  opts->back_projection_step = o.back_projection ? o.back_projection->step : 1.0;
  opts->threads = o.threads;
}

raisr_status raisr_upscale(const raisr_image* lr, const raisr_bank* bank, const raisr_upscale_options* opts,
                           raisr_image** out, raisr_timings* timings) {
  return guarded([&] {
    require(lr && bank && out, "null argument");
    raisr::StageTimings t;
    raisr::Raster up = raisr::upscale_raster(lr->raster, bank->bank, to_options(opts), &t);
    if (timings) *timings = {t.initial, t.hashing, t.filtering, t.blending, t.back_projection};
    *out = new raisr_image{std::move(up)};
  });
}

raisr_status raisr_interpolate(const raisr_image* lr, int scale, raisr_kernel kernel, raisr_image** out) {
  return guarded([&] {
    require(lr && out, "null argument");
    *out = new raisr_image{raisr::interpolate_raster(lr->raster, scale, to_kernel(kernel))};
  });
}

raisr_status raisr_blend_map(const raisr_image* lr, const raisr_bank* bank, const raisr_upscale_options* opts,
                             raisr_image** out) {
  return guarded([&] {
    require(lr && bank && out, "null argument");
    raisr::UpscaleStages st = raisr::upscale_stages(raisr::luma(lr->raster), bank->bank, to_options(opts));
    for (double& v : st.weights.data()) v *= 255.0;
    raisr::Raster r;
    r.planes.push_back(std::move(st.weights));
    *out = new raisr_image{std::move(r)};
  });
}

raisr_status raisr_sharpen(const raisr_image* img, const char* preset, const char* layers, double ct_threshold,
                           raisr_image** out) {
  return guarded([&] {
    require(img && out, "null argument");
    require((preset == nullptr) != (layers == nullptr), "give exactly one of preset and layers");
    raisr::DogConfig cfg = preset ? raisr::DogConfig::preset(preset) : raisr::parse_layers(layers);
    cfg.ct_threshold = ct_threshold;
    *out = new raisr_image{raisr::sharpen_raster(img->raster, cfg)};
  });
}

raisr_status raisr_evaluate(const char* hr_dir, const char* lr_dir, const raisr_bank* bank,
                            const raisr_upscale_options* opts, char** json, char** table) {
  return guarded([&] {
    require(hr_dir && bank, "null argument");
    raisr::EvaluateConfig cfg;
    cfg.hr_dir = hr_dir;
    if (lr_dir) cfg.lr_dir = std::filesystem::path(lr_dir);
    cfg.options = to_options(opts);
    const raisr::EvaluationReport report = raisr::evaluate(bank->bank, cfg);
    char* j = json ? dup_string(report.to_json()) : nullptr;
    char* t = nullptr;
    try {
      t = table ? dup_string(report.to_table()) : nullptr;
    } catch (...) {
      std::free(j);
      throw;
    }
    if (json) *json = j;
    if (table) *table = t;
  });
}

raisr_status raisr_dump_filters(const raisr_bank* bank, const char* path) {
  return guarded([&] {
    require(bank && path, "null argument");
    const auto grids = raisr::filter_grids(bank->bank);
    const std::filesystem::path p(path);
    for (std::size_t t = 0; t < grids.size(); ++t) {
      std::filesystem::path target = p;
      if (grids.size() > 1)
        target = p.parent_path() / (p.stem().string() + "_t" + std::to_string(t) + p.extension().string());
      raisr::write_image(target, grids[t]);
    }
  });
}

}  // extern "C"
