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

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "raisr/filter_bank.hpp"
#include "raisr/hashing.hpp"
#include "raisr/image.hpp"

namespace raisr {

// Filter learning.
//
// Training never materializes the patch matrix A: every (key, pixel type)
// bucket keeps only the normal equations Q = A^T A and V = A^T b, so memory is
// fixed by the bank shape no matter how many images are streamed through.

struct TrainingSample {
  std::vector<double> patch;  // d*d values, row-major, centered on the pixel
  double target = 0;          // ground-truth HR pixel
  GradientKey key;
  int pixel_type = 0;
};

/// Copies the d x d neighborhood of (row, col) into `out` (edge-replicated).
void extract_patch(const ImagePlane& y, int row, int col, int filter_dim, std::span<double> out);

/// One sample per grid pixel at least filter_dim/2 away from every border.
/// `y` is the initial interpolation, `x` the (possibly sharpened) HR target.
std::vector<TrainingSample> extract_samples(const ImagePlane& y, const ImagePlane& x,
                                            const Quantizer& q, int filter_dim, int scale,
                                            int stride = 1, const HashWindow& window = {});

struct TrainingPair {
  ImagePlane initial;  // y: cheap upscale of the degraded image
  ImagePlane target;   // x: HR ground truth, same shape as y
};

class AccumulatorBank {
 public:
  explicit AccumulatorBank(BankConfig config);

  const BankConfig& config() const noexcept { return config_; }
  int buckets() const noexcept { return config_.buckets(); }
  int taps() const noexcept { return taps_; }

  void accumulate(const TrainingSample& sample);
  void accumulate(int bucket, std::span<const double> patch, double target);
  /// `patches` holds k consecutive samples of taps() values each. Same result,
  /// bit for bit, as k single accumulate() calls in order.
  void accumulate_block(int bucket, std::span<const double> patches, std::span<const double> targets);

  double q(int bucket, int i, int j) const noexcept;
  /// Full taps() x taps() row-major copy of Q.
  std::vector<double> dense_q(int bucket) const;
  std::span<const double> v(int bucket) const noexcept {
    return {v_.data() + std::size_t(bucket) * taps_, std::size_t(taps_)};
  }
  std::uint64_t count(int bucket) const noexcept { return count_[bucket]; }
  std::uint64_t total_count() const noexcept;

  /// Bytes held by the accumulators; depends on the configuration only.
  std::size_t footprint_bytes() const noexcept;

  /// Entrywise sum; throws Error(Usage) on a configuration mismatch.
  void merge_from(const AccumulatorBank& other);

  // Raw access for the symmetry pass: upper triangle, row-major packed.
  std::span<const double> packed_q(int bucket) const noexcept {
    return {q_.data() + std::size_t(bucket) * packed_, packed_};
  }
  std::span<double> packed_q(int bucket) noexcept { return {q_.data() + std::size_t(bucket) * packed_, packed_}; }
  std::span<double> mutable_v(int bucket) noexcept { return {v_.data() + std::size_t(bucket) * taps_, std::size_t(taps_)}; }
  void add_count(int bucket, std::uint64_t n) noexcept { count_[bucket] += n; }

  friend bool operator==(const AccumulatorBank&, const AccumulatorBank&) = default;

 private:
  BankConfig config_;
  int taps_;
  std::size_t packed_;
  std::vector<double> q_;
  std::vector<double> v_;
  std::vector<std::uint64_t> count_;
};

AccumulatorBank merge(const AccumulatorBank& a, const AccumulatorBank& b);

/// Accumulates every sample of every pair. Buckets are partitioned across
/// threads and each bucket sees its samples in pair-then-raster order, so the
/// result is bit-identical for any thread count.
void accumulate_pairs(AccumulatorBank& bank, std::span<const TrainingPair> pairs, int stride = 1,
                      const HashWindow& window = {}, int threads = 1);

/// Index of (i, j), i <= j, in a packed upper triangle of an n x n matrix.
inline std::size_t packed_index(int n, int i, int j) noexcept {
  return std::size_t(i) * n - std::size_t(i) * (i - 1) / 2 + (j - i);
}

// ---- Dihedral symmetry ------------------------------------------------------

/// Signed permutation acting on (row, col) offsets: (r', c') = M (r, c).
struct DihedralTransform {
  int m[2][2];
};

/// Identity, the two flips, the half turn, the transpose, both quarter turns
/// and the anti-transpose.
const std::array<DihedralTransform, 8>& dihedral_group();

/// perm[i] is the source index read by output index i when transforming a
/// d x d row-major patch.
std::vector<int> patch_permutation(const DihedralTransform& t, int filter_dim);

/// Angle bin reached by rotating/reflecting an orientation in bin `bin`.
int transform_angle_bin(const DihedralTransform& t, int bin, int angle_bins);

/// Pixel type after transforming the HR lattice phase (row mod s, col mod s).
int transform_pixel_type(const DihedralTransform& t, int pixel_type, int scale);

/// Sums every bucket's normal equations over the 8 transforms of the square.
/// Requires angle_bins divisible by 4.
AccumulatorBank augment_symmetry(const AccumulatorBank& bank);

// ---- Solving ----------------------------------------------------------------

struct CgOptions {
  double tol = 1e-12;  // on ||Q h - v|| / ||v||
  int max_iter = 0;    // 0 means 4 * n
};

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0;
  bool converged = true;
};

/// Conjugate gradients on a dense symmetric n x n row-major matrix.
/// Returns the best iterate with converged = false when max_iter runs out;
/// throws Error(Numeric) if the iteration produces NaN/Inf.
CgResult cg_solve(std::span<const double> q, std::span<const double> v, const CgOptions& options = {});

struct SolveOptions {
  double ridge = 1e-4;        // relative to the largest diagonal entry of Q
  double thin_ridge = 1e-2;   // used when count < thin_factor * d^2
  int thin_factor = 10;
  CgOptions cg;
  int threads = 1;
};

struct BucketReport {
  std::uint64_t count = 0;
  double ridge = 0;
  double residual = 0;  // relative residual of the regularized system
  int iterations = 0;
  bool converged = true;
  bool thin = false;
  bool passthrough = false;  // empty bucket, delta filter
};

struct SolveResult {
  FilterBank bank;
  std::vector<BucketReport> buckets;
};

SolveResult solve_filters(const AccumulatorBank& bank, const SolveOptions& options = {});

}  // namespace raisr
