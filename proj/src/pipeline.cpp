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

#include "raisr/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "parallel.hpp"
#include "raisr/error.hpp"
#include "raisr/image_io.hpp"

namespace raisr {

using nlohmann::ordered_json;

// ---- Names and presets ---------------------------------------------------------

std::string to_string(Kernel k) {
  switch (k) {
    case Kernel::Nearest: return "nearest";
    case Kernel::Bilinear: return "bilinear";
    case Kernel::Bicubic: return "bicubic";
  }
  return "?";
}

std::string to_string(BlendMode m) {
  switch (m) {
    case BlendMode::None: return "none";
    case BlendMode::Randomness: return "randomness";
    case BlendMode::Hamming: return "hamming";
  }
  return "?";
}

Kernel parse_kernel(const std::string& name) {
  if (name == "nearest") return Kernel::Nearest;
  if (name == "bilinear") return Kernel::Bilinear;
  if (name == "bicubic") return Kernel::Bicubic;
  fail_usage("unknown kernel: " + name);
}

BlendMode parse_blend(const std::string& name) {
  if (name == "none") return BlendMode::None;
  if (name == "randomness") return BlendMode::Randomness;
  if (name == "hamming") return BlendMode::Hamming;
  fail_usage("unknown blend mode: " + name);
}

PipelineMode parse_mode(const std::string& name) {
  if (name == "sisr") return PipelineMode::Sisr;
  if (name == "enhance") return PipelineMode::Enhance;
  fail_usage("unknown mode: " + name);
}

ModePreset ModePreset::of(PipelineMode mode) {
  if (mode == PipelineMode::Sisr) return {Kernel::Bicubic, BlendMode::Randomness, true, std::nullopt, "detail"};
  return {Kernel::Bilinear, BlendMode::Hamming, false, 85, "contrast"};
}

UpscaleOptions upscale_options_for(PipelineMode mode) {
  const ModePreset p = ModePreset::of(mode);
  UpscaleOptions o;
  o.initial = p.initial;
  o.blend = p.blend;
  if (p.back_projection) o.back_projection = BackProjection{};
  return o;
}

TrainConfig TrainConfig::for_mode(PipelineMode mode) {
  const ModePreset p = ModePreset::of(mode);
  TrainConfig cfg;
  cfg.initial = p.initial;
  cfg.compress_lr = p.compress_lr;
  cfg.sharpen_targets = p.sharpen_targets;
  return cfg;
}

void TrainConfig::validate() const {
  bank.validate();
  if (stride < 1) fail_usage("stride must be >= 1");
  if (!(ridge >= 0) || !std::isfinite(ridge)) fail_usage("ridge must be finite and non-negative");
  if (threads < 1) fail_usage("threads must be >= 1");
  if (compress_lr && (*compress_lr < 0 || *compress_lr > 100)) fail_usage("compression quality must be in [0,100]");
  if (sharpen_targets) resolve_sharpener(*sharpen_targets);
  if (symmetry && bank.quantizer.angle_bins % 4 != 0)
    fail_usage("symmetry augmentation needs angle bins divisible by 4 (or --symmetry off)");
  if (window.size < 1 || window.size % 2 == 0 || !(window.sigma > 0)) fail_usage("invalid hashing window");
}

// ---- Training ------------------------------------------------------------------

TrainingPair make_training_pair(const ImagePlane& hr, const TrainConfig& cfg) {
  const int s = cfg.bank.scale;
  const ImagePlane cropped = crop_to_multiple(hr, s);
  DegradationSpec spec;
  spec.scale = s;
  spec.codec_quality = cfg.compress_lr;
  const auto workdir = cfg.workdir.empty() ? std::filesystem::temp_directory_path() : cfg.workdir;
  const ImagePlane lr = degrade(cropped, spec, workdir);
  TrainingPair pair{resample(lr, cropped.width(), cropped.height(), cfg.initial),
                    cfg.sharpen_targets ? sharpen(cropped, resolve_sharpener(*cfg.sharpen_targets)) : cropped};
  return pair;
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) fail_io("not a directory: " + dir.string());
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && is_image_file(entry.path())) out.push_back(entry.path());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  return out;
}

namespace {

using Loader = std::function<ImagePlane(int)>;

// Images are prepared in chunks so memory stays bounded for large corpora.
TrainResult train_impl(int count, const std::vector<std::string>& names, const Loader& load, const TrainConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int min_side = cfg.bank.filter_dim + 2 * cfg.bank.scale;
  AccumulatorBank acc(cfg.bank);
  TrainReport report;
  constexpr int kChunk = 32;
  for (int start = 0; start < count; start += kChunk) {
    const int n = std::min(kChunk, count - start);
    std::vector<std::optional<TrainingPair>> prepared(n);
    std::vector<std::string> problems(n);
    detail::parallel_for(n, cfg.threads, [&](int i) {
      try {
        const ImagePlane hr = load(start + i);
        if (hr.width() < min_side || hr.height() < min_side) {
          problems[i] = "smaller than " + std::to_string(min_side) + " pixels per side";
          return;
        }
        prepared[i] = make_training_pair(hr, cfg);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Io) throw;
        problems[i] = e.what();
      }
    });
    std::vector<TrainingPair> pairs;
    for (int i = 0; i < n; ++i) {
      if (prepared[i]) {
        pairs.push_back(std::move(*prepared[i]));
        report.images.push_back(names[start + i]);
      } else {
        report.warnings.push_back("skipped " + names[start + i] + ": " + problems[i]);
      }
    }
    accumulate_pairs(acc, pairs, cfg.stride, cfg.window, cfg.threads);
  }
  if (report.images.empty()) fail_io("no usable training images");
  report.samples = acc.total_count();
  if (cfg.symmetry) acc = augment_symmetry(acc);

  SolveOptions solve;
  solve.ridge = cfg.ridge;
  solve.threads = cfg.threads;
  SolveResult solved = solve_filters(acc, solve);
  report.buckets = std::move(solved.buckets);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(solved.bank), std::move(report)};
}

}  // namespace

TrainResult train(const TrainConfig& cfg) {
  cfg.validate();
  const auto paths = list_images(cfg.corpus);
  if (paths.empty()) fail_io("corpus has no images: " + cfg.corpus.string());
  std::vector<std::string> names;
  for (const auto& p : paths) names.push_back(p.filename().string());
  return train_impl(int(paths.size()), names, [&](int i) { return luma(read_image(paths[i])); }, cfg);
}

TrainResult train_planes(const std::vector<ImagePlane>& hr, const TrainConfig& cfg) {
  if (hr.empty()) fail_usage("no training images");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < hr.size(); ++i) names.push_back("image_" + std::to_string(i));
  return train_impl(int(hr.size()), names, [&](int i) { return hr[i]; }, cfg);
}

int TrainReport::flagged() const noexcept {
  int n = 0;
  for (const auto& b : buckets) n += (b.thin || b.passthrough || !b.converged) ? 1 : 0;
  return n;
}

std::string TrainReport::to_json(const TrainConfig& cfg) const {
  const Quantizer& q = cfg.bank.quantizer;
  ordered_json j;
  j["schema"] = "raisr-train-report/1";
  j["config"] = {{"scale", cfg.bank.scale},
                 {"filter_dim", cfg.bank.filter_dim},
                 {"angle_bins", q.angle_bins},
                 {"strength_bins", q.strength_bins},
                 {"coherence_bins", q.coherence_bins},
                 {"strength_thresholds", q.strength_thresholds},
                 {"coherence_thresholds", q.coherence_thresholds},
                 {"stride", cfg.stride},
                 {"ridge", cfg.ridge},
                 {"symmetry", cfg.symmetry},
                 {"sharpen_targets", cfg.sharpen_targets ? ordered_json(*cfg.sharpen_targets) : ordered_json()},
                 {"compress_lr", cfg.compress_lr ? ordered_json(*cfg.compress_lr) : ordered_json()},
                 {"initial", to_string(cfg.initial)}};
  j["images"] = images;
  j["warnings"] = warnings;
  j["samples"] = samples;
  int populated = 0, thin = 0, passthrough = 0, unconverged = 0;
  ordered_json list = ordered_json::array();
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    const BucketReport& r = buckets[b];
    const GradientKey k = key_from_index(int(b) / cfg.bank.pixel_types(), q);
    populated += r.count > 0;
    thin += r.thin;
    passthrough += r.passthrough;
    unconverged += !r.converged;
    list.push_back({{"bucket", b},
                    {"angle", k.angle},
                    {"strength", k.strength},
                    {"coherence", k.coherence},
                    {"pixel_type", int(b) % cfg.bank.pixel_types()},
                    {"count", r.count},
                    {"ridge", r.ridge},
                    {"residual", r.residual},
                    {"iterations", r.iterations},
                    {"converged", r.converged},
                    {"thin", r.thin},
                    {"passthrough", r.passthrough}});
  }
  j["summary"] = {{"buckets", buckets.size()},
                  {"populated", populated},
                  {"thin", thin},
                  {"passthrough", passthrough},
                  {"not_converged", unconverged}};
  j["buckets"] = std::move(list);
  return j.dump(2) + "\n";
}

// ---- Evaluation ----------------------------------------------------------------

namespace {

// Shortest text that parses back to the same double.
std::string exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

MethodScore score(const ImagePlane& out, const ImagePlane& hr) { return {psnr(out, hr), ssim(out, hr)}; }

ImagePlane crop(const ImagePlane& p, int w, int h) {
  ImagePlane out(w, h);
  for (int r = 0; r < h; ++r) std::copy_n(p.row(r).begin(), w, out.row(r).begin());
  return out;
}

}  // namespace

EvaluationReport evaluate(const FilterBank& bank, const EvaluateConfig& cfg) {
  const int s = bank.config().scale;
  const auto paths = list_images(cfg.hr_dir);
  if (paths.empty()) fail_io("no images in " + cfg.hr_dir.string());
  const auto workdir = cfg.workdir.empty() ? std::filesystem::temp_directory_path() : cfg.workdir;

  EvaluationReport report;
  report.scale = s;
  for (const auto& path : paths) {
    ImagePlane hr = crop_to_multiple(luma(read_image(path)), s);
    ImagePlane lr(0, 0);
    if (cfg.lr_dir) {
      lr = luma(read_image(*cfg.lr_dir / path.filename()));
      if (lr.width() * s > hr.width() || lr.height() * s > hr.height())
        fail_io("LR image " + path.filename().string() + " is larger than HR / scale");
      hr = crop(hr, lr.width() * s, lr.height() * s);
    } else {
      DegradationSpec spec;
      spec.scale = s;
      lr = degrade(hr, spec, workdir);
    }
    EvaluationRow row;
    row.image = path.filename().string();
    row.bilinear = score(quantize8(resample(lr, hr.width(), hr.height(), Kernel::Bilinear)), hr);
    row.bicubic = score(quantize8(resample(lr, hr.width(), hr.height(), Kernel::Bicubic)), hr);
    const auto t0 = std::chrono::steady_clock::now();
    const ImagePlane up = upscale(lr, bank, cfg.options);
    row.raisr_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.raisr = score(quantize8(up), hr);
    report.rows.push_back(row);
  }

  EvaluationRow& m = report.mean;
  m.image = "mean";
  for (const auto& r : report.rows) {
    m.bilinear.psnr += r.bilinear.psnr;
    m.bilinear.ssim += r.bilinear.ssim;
    m.bicubic.psnr += r.bicubic.psnr;
    m.bicubic.ssim += r.bicubic.ssim;
    m.raisr.psnr += r.raisr.psnr;
    m.raisr.ssim += r.raisr.ssim;
    m.raisr_seconds += r.raisr_seconds;
  }
  const double n = double(report.rows.size());
  for (double* v : {&m.bilinear.psnr, &m.bilinear.ssim, &m.bicubic.psnr, &m.bicubic.ssim, &m.raisr.psnr,
                    &m.raisr.ssim, &m.raisr_seconds})
    *v /= n;
  return report;
}

std::string EvaluationReport::to_json() const {
  auto row_json = [](const EvaluationRow& r) {
    ordered_json j;
    j["image"] = r.image;
    j["bilinear"] = {{"psnr", r.bilinear.psnr}, {"ssim", r.bilinear.ssim}};
    j["bicubic"] = {{"psnr", r.bicubic.psnr}, {"ssim", r.bicubic.ssim}};
    j["raisr"] = {{"psnr", r.raisr.psnr}, {"ssim", r.raisr.ssim}};
    j["raisr_seconds"] = r.raisr_seconds;
    return j;
  };
  ordered_json j;
  j["schema"] = "raisr-eval-report/1";
  j["scale"] = scale;
  j["psnr_cap"] = kPsnrCap;
  j["images"] = ordered_json::array();
  for (const auto& r : rows) j["images"].push_back(row_json(r));
  j["mean"] = row_json(mean);
  return j.dump(2) + "\n";
}

std::string EvaluationReport::to_table() const {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"image", "bilinear_psnr", "bilinear_ssim", "bicubic_psnr", "bicubic_ssim", "raisr_psnr",
                   "raisr_ssim", "raisr_seconds"});
  auto add = [&](const EvaluationRow& r) {
    cells.push_back({r.image, exact(r.bilinear.psnr), exact(r.bilinear.ssim), exact(r.bicubic.psnr),
                     exact(r.bicubic.ssim), exact(r.raisr.psnr), exact(r.raisr.ssim), exact(r.raisr_seconds)});
  };
  for (const auto& r : rows) add(r);
  add(mean);
  std::vector<std::size_t> width(cells[0].size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    if (r == cells.size() - 1) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      out << std::string(total - 2, '-') << "\n";
    }
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      if (c == 0)
        out << std::left << std::setw(int(width[c])) << cells[r][c];
      else
        out << "  " << std::right << std::setw(int(width[c])) << cells[r][c];
    }
    out << "\n";
  }
  out << "PSNR in dB on luma, capped at " << exact(kPsnrCap) << "; scale " << scale << "\n";
  return out.str();
}

// ---- Inspection and sharpening ---------------------------------------------

std::vector<ImagePlane> filter_grids(const FilterBank& bank) {
  const BankConfig& cfg = bank.config();
  const Quantizer& q = cfg.quantizer;
  const int d = cfg.filter_dim;
  std::vector<ImagePlane> grids;
  for (int t = 0; t < cfg.pixel_types(); ++t) {
    ImagePlane grid(q.angle_bins * d, q.strength_bins * q.coherence_bins * d);
    for (int key = 0; key < q.key_count(); ++key) {
      const GradientKey k = key_from_index(key, q);
      const auto f = bank.filter(cfg.bucket_index(key, t));
      const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
      const double range = *hi - *lo;
      const int r0 = (k.strength * q.coherence_bins + k.coherence) * d, c0 = k.angle * d;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          grid(r0 + i, c0 + j) = range > 0 ? 255.0 * (f[std::size_t(i) * d + j] - *lo) / range : 0.0;
    }
    grids.push_back(std::move(grid));
  }
  return grids;
}

Raster sharpen_raster(const Raster& img, const DogConfig& cfg) {
  if (img.planes.empty()) fail_usage("empty image");
  if (img.is_gray()) return Raster{{sharpen(img.planes[0], cfg)}};
  YCbCrPlanes ycc = rgb_to_ycbcr(img.color());
  ycc.y = sharpen(ycc.y, cfg);
  ColorImage rgb = ycbcr_to_rgb(ycc);
  return Raster::from_color({clamp_to_range(std::move(rgb.r)), clamp_to_range(std::move(rgb.g)),
                             clamp_to_range(std::move(rgb.b))});
}

DogConfig parse_layers(const std::string& spec) {
  DogConfig cfg;
  std::stringstream list(spec);
  std::string item;
  while (std::getline(list, item, ',')) {
    std::stringstream fields(item);
    std::string sigma, rho, mode;
    if (!std::getline(fields, sigma, ':') || !std::getline(fields, rho, ':') || !std::getline(fields, mode, ':'))
      fail_usage("layer '" + item + "' is not sigma:rho:mode");
    double sv = 0, rv = 0;
    try {
      std::size_t used = 0;
      sv = std::stod(sigma, &used);
      if (used != sigma.size()) throw std::invalid_argument(sigma);
      rv = std::stod(rho, &used);
      if (used != rho.size()) throw std::invalid_argument(rho);
    } catch (const std::exception&) {
      fail_usage("layer '" + item + "' has a malformed number");
    }
    cfg.layers.push_back(DogLayerSpec::from_sigma(sv, rv, parse_blend(mode)));
  }
  cfg.validate();
  return cfg;
}

DogConfig resolve_sharpener(const std::string& name_or_layers) {
  if (name_or_layers.find(':') != std::string::npos) return parse_layers(name_or_layers);
  return DogConfig::preset(name_or_layers);
}

}  // namespace raisr
