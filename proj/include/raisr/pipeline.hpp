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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "raisr/filter_bank.hpp"
#include "raisr/image.hpp"
#include "raisr/learner.hpp"
#include "raisr/sharpener.hpp"
#include "raisr/upscaler.hpp"

namespace raisr {

enum class PipelineMode { Sisr, Enhance };

/// Defaults per mode. SISR: bicubic initial, randomness blending,
/// back-projection, "detail" targets. Enhance: bilinear initial, Hamming
/// blending, no back-projection, JPEG 85 LR, "contrast" targets.
struct ModePreset {
  Kernel initial;
  BlendMode blend;
  bool back_projection;
  std::optional<int> compress_lr;
  std::optional<std::string> sharpen_targets;

  static ModePreset of(PipelineMode mode);
};

PipelineMode parse_mode(const std::string& name);

/// Upscaling defaults of a mode (back-projection: 10 iterations, step 1).
UpscaleOptions upscale_options_for(PipelineMode mode);

struct TrainConfig {
  std::filesystem::path corpus;
  BankConfig bank;
  int stride = 1;
  double ridge = 1e-4;
  bool symmetry = true;
  std::optional<std::string> sharpen_targets = "detail";
  std::optional<int> compress_lr;
  Kernel initial = Kernel::Bicubic;
  HashWindow window;
  int threads = 1;
  std::filesystem::path workdir;  // scratch for codec round trips; empty = system temp

  static TrainConfig for_mode(PipelineMode mode);
  void validate() const;
};

struct TrainReport {
  std::vector<std::string> images;    // used, in processing order
  std::vector<std::string> warnings;  // skipped files etc.
  std::uint64_t samples = 0;          // before symmetry augmentation
  std::vector<BucketReport> buckets;
  double seconds = 0;                 // wall time; not part of the JSON

  /// Buckets that were thin, passthrough or did not converge.
  int flagged() const noexcept;
  std::string to_json(const TrainConfig& cfg) const;
};

struct TrainResult {
  FilterBank bank;
  TrainReport report;
};

/// Builds the (initial, target) pair for one HR luma plane: optional target
/// sharpening, crop to a multiple of s, degradation, initial interpolation.
TrainingPair make_training_pair(const ImagePlane& hr, const TrainConfig& cfg);

/// Sorted list of decodable-looking image files directly inside `dir`.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

TrainResult train(const TrainConfig& cfg);
/// Same as train() over in-memory HR luma planes.
TrainResult train_planes(const std::vector<ImagePlane>& hr, const TrainConfig& cfg);

struct EvaluateConfig {
  std::filesystem::path hr_dir;
  std::optional<std::filesystem::path> lr_dir;  // matching file names; else bicubic degradation
  UpscaleOptions options;
  std::filesystem::path workdir;
};

struct MethodScore {
  double psnr = 0;
  double ssim = 0;
};

struct EvaluationRow {
  std::string image;
  MethodScore bilinear, bicubic, raisr;
  double raisr_seconds = 0;
};

struct EvaluationReport {
  int scale = 2;
  std::vector<EvaluationRow> rows;
  EvaluationRow mean;  // arithmetic mean of rows, image = "mean"

  std::string to_json() const;
  std::string to_table() const;
};

/// PSNR/SSIM on luma for bilinear, bicubic and RAISR upscales of each HR
/// image's degraded version. Outputs are rounded to 8 bits before scoring.
EvaluationReport evaluate(const FilterBank& bank, const EvaluateConfig& cfg);

/// One grid per pixel type: angle along columns, (strength, coherence) along
/// rows, each d x d tile min-max normalized to [0,255].
std::vector<ImagePlane> filter_grids(const FilterBank& bank);

/// Sharpens luma; chroma is passed through.
Raster sharpen_raster(const Raster& img, const DogConfig& cfg);

/// Parses "sigma:rho:mode,..." where mode is none|randomness|hamming.
DogConfig parse_layers(const std::string& spec);
/// A preset name ("detail", "contrast") or a parse_layers() list.
DogConfig resolve_sharpener(const std::string& name_or_layers);

std::string to_string(Kernel k);
std::string to_string(BlendMode m);
Kernel parse_kernel(const std::string& name);
BlendMode parse_blend(const std::string& name);

}  // namespace raisr
