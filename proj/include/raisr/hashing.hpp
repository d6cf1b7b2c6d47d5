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

#include <cstdint>
#include <vector>

#include "raisr/image.hpp"

namespace raisr {

// Per-pixel gradient statistics and their quantization into hash keys.
//
// The structure tensor of pixel k is the Gaussian-weighted sum of gradient
// outer products over a window centered on k; its dominant eigenvector gives
// the edge orientation, sqrt(lambda1) the strength, and the normalized
// difference of the root eigenvalues the coherence.

struct GradientField {
  ImagePlane gx, gy;
};

/// Entries of the symmetric 2x2 tensor [[a, b], [b, c]].
struct StructureTensor {
  double a = 0, b = 0, c = 0;
};

struct EigenPair {
  double lambda1 = 0;  // largest
  double lambda2 = 0;  // smallest, >= 0
  double theta = 0;    // dominant eigenvector angle in degrees, [0, 180)
};

struct Quantizer {
  int angle_bins = 24;
  int strength_bins = 3;
  int coherence_bins = 3;
  std::vector<double> strength_thresholds{8.0, 32.0};  // on sqrt(lambda1)
  std::vector<double> coherence_thresholds{0.25, 0.5};

  int key_count() const noexcept { return angle_bins * strength_bins * coherence_bins; }
  /// Throws Error(Usage) when bin counts and thresholds disagree or are out of range.
  void validate() const;

  friend bool operator==(const Quantizer&, const Quantizer&) = default;
};

struct GradientKey {
  int angle = 0;
  int strength = 0;
  int coherence = 0;

  friend bool operator==(const GradientKey&, const GradientKey&) = default;
};

/// Dense key index, angle slowest and coherence fastest.
inline int key_index(const GradientKey& k, const Quantizer& q) noexcept {
  return (k.angle * q.strength_bins + k.strength) * q.coherence_bins + k.coherence;
}
GradientKey key_from_index(int index, const Quantizer& q) noexcept;

struct HashWindow {
  int size = 9;        // odd
  double sigma = 2.0;  // Gaussian weight sigma
};

/// Central differences with edge replication. Needs at least 3x3.
GradientField compute_gradients(const ImagePlane& p);

/// Normalized 1-D Gaussian of odd length `size`.
std::vector<double> gaussian_window(int size, double sigma);

/// Weighted second moments around (row, col), window taps outer(w, w).
StructureTensor structure_tensor(const GradientField& f, int row, int col,
                                 const HashWindow& window = {});

/// Closed-form eigen-decomposition; theta = 0 for isotropic tensors.
EigenPair eigen2x2(const StructureTensor& t) noexcept;

/// (sqrt(l1) - sqrt(l2)) / (sqrt(l1) + sqrt(l2)); 0 when both vanish.
double coherence(const EigenPair& e) noexcept;

GradientKey hash_key(const EigenPair& e, const Quantizer& q) noexcept;

/// Hash of every pixel of `p`, row-major, as dense key indices.
std::vector<std::int32_t> compute_key_map(const ImagePlane& p, const Quantizer& q,
                                          const HashWindow& window = {});

}  // namespace raisr
