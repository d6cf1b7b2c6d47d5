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

// raisr: train, apply and inspect hashed upscaling filters.
//
// Exit codes: 0 success, 1 usage error, 2 I/O error, 3 numerical failure
// (internal errors also exit with 3).

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "raisr/raisr.h"

namespace {

struct Failure {
  int code;
  std::string message;
};

int exit_code(raisr_status s) {
  switch (s) {
    case RAISR_OK: return 0;
    case RAISR_ERR_USAGE: return 1;
    case RAISR_ERR_IO: return 2;
    default: return 3;
  }
}

void check(raisr_status s) {
  if (s != RAISR_OK) throw Failure{exit_code(s), raisr_last_error()};
}

[[noreturn]] void usage(const std::string& msg) { throw Failure{1, msg}; }

// RAII holders for the C handles.
struct Image {
  raisr_image* p = nullptr;
  ~Image() { raisr_image_free(p); }
};
struct Bank {
  raisr_bank* p = nullptr;
  ~Bank() { raisr_bank_free(p); }
};
struct CString {
  char* p = nullptr;
  ~CString() { raisr_string_free(p); }
};

raisr_mode parse_mode(const std::string& s) {
  if (s == "sisr") return RAISR_MODE_SISR;
  if (s == "enhance") return RAISR_MODE_ENHANCE;
  usage("unknown mode: " + s);
}

raisr_kernel parse_kernel(const std::string& s) {
  if (s == "nearest") return RAISR_NEAREST;
  if (s == "bilinear") return RAISR_BILINEAR;
  if (s == "bicubic") return RAISR_BICUBIC;
  usage("unknown kernel: " + s);
}

raisr_blend parse_blend(const std::string& s) {
  if (s == "none") return RAISR_BLEND_NONE;
  if (s == "randomness") return RAISR_BLEND_RANDOMNESS;
  if (s == "hamming") return RAISR_BLEND_HAMMING;
  usage("unknown blend mode: " + s);
}

bool parse_switch(const std::string& flag, const std::string& s) {
  if (s == "on") return true;
  if (s == "off") return false;
  usage(flag + " takes on or off, got " + s);
}

std::vector<double> parse_list(const std::string& flag, const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      usage(flag + ": malformed number '" + item + "'");
    }
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{2, "cannot open " + path + " for writing"};
  out << text;
  if (!out) throw Failure{2, "write failed: " + path};
}

// Upscale flags shared by `upscale` and `evaluate`; unset ones follow the mode.
struct UpscaleFlags {
  std::string mode = "sisr";
  std::optional<std::string> initial, blend, blend_smooth;
  std::optional<double> ct_threshold, bp_step;
  std::optional<int> bp_iters;
  int threads = 1;

  void add(CLI::App* app) {
    app->add_option("--mode", mode, "Preset: sisr or enhance")->capture_default_str();
    app->add_option("--initial", initial, "Initial interpolator: nearest, bilinear, bicubic");
    app->add_option("--blend", blend, "Blending: none, randomness, hamming");
    app->add_option("--blend-smooth", blend_smooth, "3x3 smoothing of the blend weights: on/off");
    app->add_option("--ct-threshold", ct_threshold, "Census comparison threshold (default 4)");
    app->add_option("--bp-iters", bp_iters, "Back-projection iterations, 0 disables");
    app->add_option("--bp-step", bp_step, "Back-projection step (default 1)");
    app->add_option("--threads", threads, "Worker threads")->capture_default_str();
  }

  raisr_upscale_options resolve() const {
    raisr_upscale_options o;
    raisr_upscale_options_init(&o, parse_mode(mode));
    if (initial) o.initial = parse_kernel(*initial);
    if (blend) o.blend = parse_blend(*blend);
    if (blend_smooth) o.blend_smooth = parse_switch("--blend-smooth", *blend_smooth);
    if (ct_threshold) o.ct_threshold = *ct_threshold;
    if (bp_iters) {
      if (*bp_iters < 0) usage("--bp-iters must be >= 0");
      o.back_projection_iters = *bp_iters;
    }
    if (bp_step) o.back_projection_step = *bp_step;
    if (threads < 1) usage("--threads must be >= 1");
    o.threads = threads;
    return o;
  }
};

void load_bank(const std::string& path, std::optional<int> scale, Bank& bank) {
  check(raisr_bank_load(path.c_str(), &bank.p));
  raisr_bank_info info;
  check(raisr_bank_info_get(bank.p, &info));
  if (scale && *scale != info.scale)
    usage("--scale " + std::to_string(*scale) + " does not match the bank's scale " + std::to_string(info.scale));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RAISR: learned hashed filters for fast image upscaling"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(raisr_version()));

  // ---- train ----
  auto* train = app.add_subcommand("train", "Learn a filter bank from a directory of HR images");
  std::string corpus, bank_out, report_path, train_mode = "sisr", workdir;
  std::optional<int> t_scale, filter_size, angle_bins, strength_bins, coherence_bins, stride, t_threads;
  std::optional<std::string> strength_thr, coherence_thr, symmetry, sharpen_targets, compress_lr, t_initial;
  std::optional<double> ridge;
  train->add_option("--corpus", corpus, "Directory of training images (PNG/PPM/PGM/JPEG)")->required();
  train->add_option("--out", bank_out, "Output filter bank file")->required();
  train->add_option("--report", report_path, "Write the JSON training report here");
  train->add_option("--mode", train_mode, "Preset: sisr or enhance")->capture_default_str();
  train->add_option("--scale", t_scale, "Upscaling factor (default 2)");
  train->add_option("--filter-size", filter_size, "Filter side d, odd (default 11)");
  train->add_option("--angle-bins", angle_bins, "Orientation bins (default 24)");
  train->add_option("--strength-bins", strength_bins, "Strength bins (default 3)");
  train->add_option("--coherence-bins", coherence_bins, "Coherence bins (default 3)");
  train->add_option("--strength-thresholds", strength_thr, "Comma list on sqrt(lambda1) (default 8,32)");
  train->add_option("--coherence-thresholds", coherence_thr, "Comma list on coherence (default 0.25,0.5)");
  train->add_option("--stride", stride, "Sampling grid step (default 1)");
  train->add_option("--ridge", ridge, "Ridge, relative to the largest diagonal of Q (default 1e-4)");
  train->add_option("--symmetry", symmetry, "Dihedral augmentation: on/off (default on)");
  train->add_option("--sharpen-targets", sharpen_targets, "Target sharpening: detail, contrast, off or a sigma:rho:mode list");
  train->add_option("--compress-lr", compress_lr, "JPEG quality for the LR images, or off");
  train->add_option("--initial", t_initial, "Initial interpolator");
  train->add_option("--threads", t_threads, "Worker threads (default 1)");
  train->add_option("--workdir", workdir, "Scratch directory for codec round trips");

  // ---- upscale ----
  auto* up = app.add_subcommand("upscale", "Upscale an image with a filter bank");
  std::string up_in, up_out, up_bank, blend_map_path;
  std::optional<int> up_scale;
  bool initial_only = false;
  UpscaleFlags up_flags;
  up->add_option("input", up_in, "Input image")->required();
  up->add_option("output", up_out, "Output image (.png/.ppm/.pgm)")->required();
  up->add_option("--bank", up_bank, "Filter bank file")->required();
  up->add_option("--scale", up_scale, "Must match the bank when given");
  up->add_flag("--initial-only", initial_only, "Only run the initial interpolation");
  up->add_option("--blend-map", blend_map_path, "Also write the blend weights as a gray image");
  up_flags.add(up);

  // ---- sharpen ----
  auto* sh = app.add_subcommand("sharpen", "Census-blended DoG sharpening");
  std::string sh_in, sh_out;
  std::optional<std::string> preset, layers;
  double sh_ct = 4.0;
  sh->add_option("input", sh_in, "Input image")->required();
  sh->add_option("output", sh_out, "Output image")->required();
  auto* preset_opt = sh->add_option("--preset", preset, "detail or contrast");
  auto* layers_opt = sh->add_option("--layers", layers, "sigma:rho:mode,... (mode none|randomness|hamming)");
  preset_opt->excludes(layers_opt);
  sh->add_option("--ct-threshold", sh_ct, "Census comparison threshold")->capture_default_str();

  // ---- evaluate ----
  auto* ev = app.add_subcommand("evaluate", "PSNR/SSIM of bilinear, bicubic and RAISR on HR test images");
  std::string ev_hr, ev_bank, ev_lr, ev_json, ev_table;
  UpscaleFlags ev_flags;
  ev->add_option("--hr", ev_hr, "Directory of HR ground-truth images")->required();
  ev->add_option("--bank", ev_bank, "Filter bank file")->required();
  ev->add_option("--lr-dir", ev_lr, "LR images with matching names (default: bicubic downscale of HR)");
  ev->add_option("--json", ev_json, "Write the JSON report here");
  ev->add_option("--table", ev_table, "Write the text table here (default: stdout)");
  ev_flags.add(ev);

  // ---- dump-filters ----
  auto* dump = app.add_subcommand("dump-filters", "Render the bank as image grids, one per pixel type");
  std::string dump_bank, dump_out;
  dump->add_option("--bank", dump_bank, "Filter bank file")->required();
  dump->add_option("output", dump_out, "Output image; _t<k> is appended per pixel type")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train) {
      raisr_train_options o;
      raisr_train_options_init(&o, parse_mode(train_mode));
      if (t_scale) o.scale = *t_scale;
      if (filter_size) o.filter_dim = *filter_size;
      if (angle_bins) o.angle_bins = *angle_bins;
      if (strength_bins) o.strength_bins = *strength_bins;
      if (coherence_bins) o.coherence_bins = *coherence_bins;
      auto fill = [](const char* flag, const std::optional<std::string>& text, int bins, double* dst) {
        if (!text) {
          if (bins != 3) usage(std::string(flag) + " is required when the bin count changes");
          return;
        }
        const auto v = parse_list(flag, *text);
        if (int(v.size()) != bins - 1)
          usage(std::string(flag) + " needs " + std::to_string(bins - 1) + " values");
        if (v.size() > RAISR_MAX_THRESHOLDS) usage(std::string(flag) + ": too many values");
        std::copy(v.begin(), v.end(), dst);
      };
      fill("--strength-thresholds", strength_thr, o.strength_bins, o.strength_thresholds);
      fill("--coherence-thresholds", coherence_thr, o.coherence_bins, o.coherence_thresholds);
      if (stride) o.stride = *stride;
      if (ridge) o.ridge = *ridge;
      if (symmetry) o.symmetry = parse_switch("--symmetry", *symmetry);
      std::string sharpen_name;
      if (sharpen_targets) {
        if (*sharpen_targets == "off") {
          o.sharpen = nullptr;
        } else {
          sharpen_name = *sharpen_targets;
          o.sharpen = sharpen_name.c_str();
        }
      }
      if (compress_lr) {
        if (*compress_lr == "off") {
          o.compress_quality = -1;
        } else {
          const auto q = parse_list("--compress-lr", *compress_lr);
          if (q.size() != 1 || q[0] != double(int(q[0]))) usage("--compress-lr takes an integer quality or off");
          o.compress_quality = int(q[0]);
        }
      }
      if (t_initial) o.initial = parse_kernel(*t_initial);
      if (t_threads) o.threads = *t_threads;
      if (!workdir.empty()) o.workdir = workdir.c_str();

      Bank bank;
      CString report;
      check(raisr_train(corpus.c_str(), &o, &bank.p, &report.p));
      check(raisr_bank_save(bank.p, bank_out.c_str()));
      if (!report_path.empty()) write_text(report_path, report.p);
      std::cerr << "wrote " << bank_out << "\n";
    } else if (*up) {
      const raisr_upscale_options o = up_flags.resolve();
      Bank bank;
      load_bank(up_bank, up_scale, bank);
      raisr_bank_info info;
      check(raisr_bank_info_get(bank.p, &info));
      Image in, out;
      check(raisr_image_load(up_in.c_str(), &in.p));
      if (initial_only) {
        check(raisr_interpolate(in.p, info.scale, o.initial, &out.p));
      } else {
        raisr_timings t{};
        check(raisr_upscale(in.p, bank.p, &o, &out.p, &t));
        const double mpix = double(raisr_image_width(out.p)) * raisr_image_height(out.p) / 1e6;
        const double total = t.initial + t.hashing + t.filtering + t.blending + t.back_projection;
        auto line = [&](const char* name, double s) {
          std::fprintf(stderr, "%-16s %9.4f s  %10.2f Mpix/s\n", name, s, s > 0 ? mpix / s : 0.0);
        };
        line("initial", t.initial);
        line("hashing", t.hashing);
        line("filtering", t.filtering);
        line("blending", t.blending);
        line("back-projection", t.back_projection);
        line("total", total);
      }
      check(raisr_image_save(out.p, up_out.c_str()));
      if (!blend_map_path.empty()) {
        Image map;
        check(raisr_blend_map(in.p, bank.p, &o, &map.p));
        check(raisr_image_save(map.p, blend_map_path.c_str()));
      }
    } else if (*sh) {
      if (!preset && !layers) usage("sharpen needs --preset or --layers");
      Image in, out;
      check(raisr_image_load(sh_in.c_str(), &in.p));
      check(raisr_sharpen(in.p, preset ? preset->c_str() : nullptr, layers ? layers->c_str() : nullptr, sh_ct,
                          &out.p));
      check(raisr_image_save(out.p, sh_out.c_str()));
    } else if (*ev) {
      const raisr_upscale_options o = ev_flags.resolve();
      Bank bank;
      load_bank(ev_bank, std::nullopt, bank);
      CString json, table;
      check(raisr_evaluate(ev_hr.c_str(), ev_lr.empty() ? nullptr : ev_lr.c_str(), bank.p, &o, &json.p, &table.p));
      if (!ev_json.empty()) write_text(ev_json, json.p);
      if (!ev_table.empty())
        write_text(ev_table, table.p);
      else
        std::cout << table.p;
    } else if (*dump) {
      Bank bank;
      load_bank(dump_bank, std::nullopt, bank);
      check(raisr_dump_filters(bank.p, dump_out.c_str()));
    }
  } catch (const Failure& f) {
    std::cerr << "raisr: " << f.message << "\n";
    return f.code;
  }
  return 0;
}
