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

// Independent reference implementations. Deliberately naive: dense loops, no
// shared helpers with the library beyond the ImagePlane container.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include "raisr/image.hpp"

namespace raisr::oracle {

/// out(r,c) = sum_ij k(i,j) p(r+i-h, c+j-h), edge-replicated.
inline ImagePlane dense_correlate(const ImagePlane& p, const std::vector<double>& k, int kd) {
  const int h = kd / 2;
  ImagePlane out(p.width(), p.height());
  for (int r = 0; r < p.height(); ++r)
    for (int c = 0; c < p.width(); ++c) {
      long double acc = 0;
      for (int i = 0; i < kd; ++i)
        for (int j = 0; j < kd; ++j) {
          const int rr = std::clamp(r + i - h, 0, p.height() - 1), cc = std::clamp(c + j - h, 0, p.width() - 1);
          acc += (long double)k[i * kd + j] * p(rr, cc);
        }
      out(r, c) = double(acc);
    }
  return out;
}

/// Sampled, normalized 2-D Gaussian of odd size kd.
inline std::vector<double> gaussian_2d(double sigma, int kd) {
  std::vector<double> k(std::size_t(kd) * kd);
  double sum = 0;
  for (int i = 0; i < kd; ++i)
    for (int j = 0; j < kd; ++j) {
      const double y = i - kd / 2, x = j - kd / 2;
      sum += k[i * kd + j] = std::exp(-(x * x + y * y) / (2 * sigma * sigma));
    }
  for (double& v : k) v /= sum;
  return k;
}

/// Roots of the characteristic polynomial l^2 - (a+c) l + (ac - b^2), largest first.
/// Uses the cancellation-free quadratic formula in long double.
inline std::pair<double, double> charpoly_eigen(double a, double b, double c) {
  const long double tr = (long double)a + c;
  const long double det = (long double)a * c - (long double)b * b;
  const long double disc = std::max((long double)0, ((long double)a - c) * ((long double)a - c) + 4.0L * b * b);
  const long double q = 0.5L * (tr + std::sqrt(disc));  // tr >= 0 for PSD input
  if (q == 0) return {0.0, 0.0};
  const long double l1 = q, l2 = det / q;
  return {double(l1), double(std::max((long double)0, l2))};
}

// ---- Dihedral group written out as explicit geometric maps -------------------
//
// Each op maps a (row, col) offset around the patch center to its image.

inline const std::vector<std::function<std::pair<int, int>(int, int)>>& square_symmetries() {
  static const std::vector<std::function<std::pair<int, int>(int, int)>> ops = {
      [](int r, int c) { return std::pair{r, c}; },    // identity
      [](int r, int c) { return std::pair{-r, c}; },   // flip up-down
      [](int r, int c) { return std::pair{r, -c}; },   // flip left-right
      [](int r, int c) { return std::pair{-r, -c}; },  // rotate 180
      [](int r, int c) { return std::pair{c, r}; },    // transpose
      [](int r, int c) { return std::pair{-c, r}; },   // rotate 90 one way
      [](int r, int c) { return std::pair{c, -r}; },   // rotate 90 the other way
      [](int r, int c) { return std::pair{-c, -r}; },  // anti-transpose
  };
  return ops;
}

/// out[g(o)] = patch[o] for a d x d row-major patch.
inline std::vector<double> transform_patch(int op, const std::vector<double>& patch, int d) {
  const auto& g = square_symmetries()[op];
  const int h = d / 2;
  std::vector<double> out(patch.size());
  for (int r = -h; r <= h; ++r)
    for (int c = -h; c <= h; ++c) {
      const auto [r2, c2] = g(r, c);
      out[(r2 + h) * d + (c2 + h)] = patch[(r + h) * d + (c + h)];
    }
  return out;
}

/// Orientation bin after the op: map the bin-center direction (row = sin,
/// col = cos) and re-bin via atan2.
inline int transform_angle(int op, int bin, int bins) {
  const double width = 180.0 / bins;
  const double theta = (bin + 0.5) * width * std::numbers::pi / 180.0;
  const double sr = std::sin(theta), sc = std::cos(theta);
  const auto& g = square_symmetries()[op];
  // The ops are linear with integer coefficients; apply them to the basis.
  const auto [r_of_r, c_of_r] = g(1, 0);
  const auto [r_of_c, c_of_c] = g(0, 1);
  const double r2 = r_of_r * sr + r_of_c * sc, c2 = c_of_r * sr + c_of_c * sc;
  double deg = std::atan2(r2, c2) * 180.0 / std::numbers::pi;
  deg = std::fmod(deg + 360.0, 180.0);
  return std::min(bins - 1, int(std::floor(deg / width)));
}

/// Pixel type after the op applied to the HR lattice phase.
inline int transform_type(int op, int type, int s) {
  const int pr = type / s, pc = type % s;
  const auto [r2, c2] = square_symmetries()[op](pr, pc);
  const int mr = ((r2 % s) + s) % s, mc = ((c2 % s) + s) % s;
  return mr * s + mc;
}

// ---- Resampling ---------------------------------------------------------------

inline double keys_cubic(double x) {
  x = std::abs(x);
  const double a = -0.5;
  if (x < 1) return (a + 2) * x * x * x - (a + 3) * x * x + 1;
  if (x < 2) return a * x * x * x - 5 * a * x * x + 8 * a * x - 4 * a;
  return 0;
}

/// Dense 1-D weight matrix (out x in) for the library's resampling convention.
inline std::vector<double> resample_matrix(int in, int out, Kernel k) {
  std::vector<double> m(std::size_t(out) * in, 0.0);
  const double ratio = double(in) / out, stretch = std::max(1.0, ratio);
  for (int i = 0; i < out; ++i) {
    const double x = i * ratio;
    if (k == Kernel::Nearest) {
      m[std::size_t(i) * in + std::clamp(int(std::floor(x + 0.5)), 0, in - 1)] = 1;
      continue;
    }
    double sum = 0;
    std::vector<double> row(in, 0.0);
    for (int j = int(std::floor(x)) - 4 * int(std::ceil(stretch)) - 2; j <= int(x) + 4 * int(std::ceil(stretch)) + 2; ++j) {
      const double t = (x - j) / stretch;
      const double w = k == Kernel::Bilinear ? std::max(0.0, 1 - std::abs(t)) : keys_cubic(t);
      row[std::clamp(j, 0, in - 1)] += w;
      sum += w;
    }
    for (int j = 0; j < in; ++j) m[std::size_t(i) * in + j] = row[j] / sum;
  }
  return m;
}

/// Resampling as two dense matrix products.
inline ImagePlane dense_resample(const ImagePlane& p, int ow, int oh, Kernel k) {
  const auto mc = resample_matrix(p.width(), ow, k), mr = resample_matrix(p.height(), oh, k);
  ImagePlane out(ow, oh);
  for (int r = 0; r < oh; ++r)
    for (int c = 0; c < ow; ++c) {
      long double acc = 0;
      for (int i = 0; i < p.height(); ++i) {
        const double wr = mr[std::size_t(r) * p.height() + i];
        if (wr == 0) continue;
        for (int j = 0; j < p.width(); ++j) acc += (long double)wr * mc[std::size_t(c) * p.width() + j] * p(i, j);
      }
      out(r, c) = double(acc);
    }
  return out;
}

// ---- SSIM ---------------------------------------------------------------------

/// Mean SSIM over every fully-inside 11x11 window (sigma 1.5), computed per
/// window from scratch.
inline double naive_ssim(const ImagePlane& a, const ImagePlane& b) {
  int n = std::min({11, a.width(), a.height()});
  if (n % 2 == 0) --n;
  const auto k = gaussian_2d(1.5, n);
  const double c1 = std::pow(0.01 * 255, 2), c2 = std::pow(0.03 * 255, 2);
  long double total = 0;
  int windows = 0;
  for (int r0 = 0; r0 + n <= a.height(); ++r0)
    for (int c0 = 0; c0 + n <= a.width(); ++c0) {
      long double ma = 0, mb = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          ma += k[i * n + j] * a(r0 + i, c0 + j);
          mb += k[i * n + j] * b(r0 + i, c0 + j);
        }
      long double va = 0, vb = 0, cov = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const long double da = a(r0 + i, c0 + j) - ma, db = b(r0 + i, c0 + j) - mb;
          va += k[i * n + j] * da * da;
          vb += k[i * n + j] * db * db;
          cov += k[i * n + j] * da * db;
        }
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++windows;
    }
  return double(total / windows);
}

}  // namespace raisr::oracle
