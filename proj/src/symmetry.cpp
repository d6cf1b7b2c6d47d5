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
#include <numbers>

#include "raisr/error.hpp"
#include "raisr/learner.hpp"

namespace raisr {

const std::array<DihedralTransform, 8>& dihedral_group() {
  static const std::array<DihedralTransform, 8> group = {{
      {{{1, 0}, {0, 1}}},
      {{{1, 0}, {0, -1}}},
      {{{-1, 0}, {0, 1}}},
      {{{-1, 0}, {0, -1}}},
      {{{0, 1}, {1, 0}}},
      {{{0, -1}, {1, 0}}},
      {{{0, 1}, {-1, 0}}},
      {{{0, -1}, {-1, 0}}},
  }};
  return group;
}

std::vector<int> patch_permutation(const DihedralTransform& t, int filter_dim) {
  const int half = filter_dim / 2;
  std::vector<int> perm(std::size_t(filter_dim) * filter_dim);
  for (int r = -half; r <= half; ++r) {
    for (int c = -half; c <= half; ++c) {
      // Signed permutation matrices are orthogonal: the inverse is the transpose.
      const int sr = t.m[0][0] * r + t.m[1][0] * c;
      const int sc = t.m[0][1] * r + t.m[1][1] * c;
      perm[std::size_t(r + half) * filter_dim + (c + half)] = (sr + half) * filter_dim + (sc + half);
    }
  }
  return perm;
}

int transform_angle_bin(const DihedralTransform& t, int bin, int angle_bins) {
  const double width = 180.0 / angle_bins;
  const double theta = (bin + 0.5) * width * std::numbers::pi / 180.0;
  // Orientation as a (row, col) vector: col = cos, row = sin.
  const double vr = std::sin(theta), vc = std::cos(theta);
  const double tr = t.m[0][0] * vr + t.m[0][1] * vc;
  const double tc = t.m[1][0] * vr + t.m[1][1] * vc;
  double deg = std::atan2(tr, tc) * 180.0 / std::numbers::pi;
  deg = std::fmod(deg + 360.0, 180.0);
  const long b = std::lround(deg / width - 0.5);
  return int(((b % angle_bins) + angle_bins) % angle_bins);
}

int transform_pixel_type(const DihedralTransform& t, int pixel_type, int scale) {
  const int pr = pixel_type / scale, pc = pixel_type % scale;
  const int r = t.m[0][0] * pr + t.m[0][1] * pc;
  const int c = t.m[1][0] * pr + t.m[1][1] * pc;
  return (((r % scale) + scale) % scale) * scale + (((c % scale) + scale) % scale);
}

AccumulatorBank augment_symmetry(const AccumulatorBank& bank) {
  const BankConfig& cfg = bank.config();
  const Quantizer& q = cfg.quantizer;
  if (q.angle_bins % 4 != 0) fail_usage("symmetry augmentation needs angle bins divisible by 4");
  const int n = cfg.taps();
  const auto& group = dihedral_group();

  std::array<std::vector<int>, 8> perms;
  for (int g = 0; g < 8; ++g) perms[g] = patch_permutation(group[g], cfg.filter_dim);

  AccumulatorBank out(cfg);
  for (int src = 0; src < cfg.buckets(); ++src) {
    if (bank.count(src) == 0) continue;
    const int type = src % cfg.pixel_types();
    const GradientKey key = key_from_index(src / cfg.pixel_types(), q);
    const auto sq = bank.packed_q(src);
    const auto sv = bank.v(src);
    for (int g = 0; g < 8; ++g) {
      GradientKey k2 = key;
      k2.angle = transform_angle_bin(group[g], key.angle, q.angle_bins);
      const int dst = cfg.bucket_index(key_index(k2, q), transform_pixel_type(group[g], type, cfg.scale));
      const auto& perm = perms[g];
      auto dq = out.packed_q(dst);
      auto dv = out.mutable_v(dst);
      for (int i = 0; i < n; ++i) {
        const int pi = perm[i];
        for (int j = i; j < n; ++j) {
          const int pj = perm[j];
          dq[packed_index(n, i, j)] += pi <= pj ? sq[packed_index(n, pi, pj)] : sq[packed_index(n, pj, pi)];
        }
        dv[i] += sv[pi];
      }
      out.add_count(dst, bank.count(src));
    }
  }
  return out;
}

}  // namespace raisr
