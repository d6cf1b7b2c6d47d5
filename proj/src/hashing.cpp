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

#include "raisr/hashing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "raisr/error.hpp"

namespace raisr {

void Quantizer::validate() const {
  auto check = [](const char* name, int bins, const std::vector<double>& thresholds) {
    if (bins < 1 || bins > 255) fail_usage(std::string(name) + " bins must be in [1,255]");
    if (int(thresholds.size()) != bins - 1)
      fail_usage(std::string(name) + " needs " + std::to_string(bins - 1) + " thresholds, got " +
                 std::to_string(thresholds.size()));
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      if (!std::isfinite(thresholds[i])) fail_usage(std::string(name) + " thresholds must be finite");
      if (i > 0 && !(thresholds[i] > thresholds[i - 1]))
        fail_usage(std::string(name) + " thresholds must be strictly increasing");
    }
  };
  if (angle_bins < 1 || angle_bins > 255) fail_usage("angle bins must be in [1,255]");
  check("strength", strength_bins, strength_thresholds);
  check("coherence", coherence_bins, coherence_thresholds);
  for (double t : coherence_thresholds)
    if (t <= 0.0 || t >= 1.0) fail_usage("coherence thresholds must lie in (0,1)");
  for (double t : strength_thresholds)
    if (t < 0.0) fail_usage("strength thresholds must be non-negative");
}

GradientKey key_from_index(int index, const Quantizer& q) noexcept {
  GradientKey k;
  k.coherence = index % q.coherence_bins;
  index /= q.coherence_bins;
  k.strength = index % q.strength_bins;
  k.angle = index / q.strength_bins;
  return k;
}

GradientField compute_gradients(const ImagePlane& p) {
  const int w = p.width(), h = p.height();
  GradientField f{ImagePlane(w, h), ImagePlane(w, h)};
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      f.gx(r, c) = 0.5 * (p.clamped(r, c + 1) - p.clamped(r, c - 1));
      f.gy(r, c) = 0.5 * (p.clamped(r + 1, c) - p.clamped(r - 1, c));
    }
  }
  return f;
}

std::vector<double> gaussian_window(int size, double sigma) {
  if (size < 1 || size % 2 == 0) fail_usage("window size must be odd and positive");
  if (!(sigma > 0)) fail_usage("window sigma must be positive");
  std::vector<double> k(size);
  double sum = 0;
  for (int i = 0; i < size; ++i) {
    const double x = i - size / 2;
    k[i] = std::exp(-x * x / (2 * sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

StructureTensor structure_tensor(const GradientField& f, int row, int col, const HashWindow& window) {
  const std::vector<double> k = gaussian_window(window.size, window.sigma);
  const int half = window.size / 2;
  StructureTensor t;
  for (int i = 0; i < window.size; ++i) {
    for (int j = 0; j < window.size; ++j) {
      const double w = k[i] * k[j];
      const double gx = f.gx.clamped(row + i - half, col + j - half);
      const double gy = f.gy.clamped(row + i - half, col + j - half);
      t.a += w * gx * gx;
      t.b += w * gx * gy;
      t.c += w * gy * gy;
    }
  }
  return t;
}

EigenPair eigen2x2(const StructureTensor& t) noexcept {
  const double m = 0.5 * (t.a + t.c);
  const double half_diff = 0.5 * (t.a - t.c);
  const double disc = std::hypot(half_diff, t.b);
  EigenPair e;
  e.lambda1 = m + disc;
  e.lambda2 = std::max(0.0, m - disc);
  if (disc == 0.0) return e;  // isotropic: any direction, report 0
  // Eigenvector for lambda1 from whichever row of (A - lambda1 I) is better conditioned.
  double vx, vy;
  if (t.a >= t.c) {
    vx = e.lambda1 - t.c;
    vy = t.b;
  } else {
    vx = t.b;
    vy = e.lambda1 - t.a;
  }
  double theta = std::atan2(vy, vx) * 180.0 / std::numbers::pi;
  if (theta < 0) theta += 180.0;
  if (theta >= 180.0) theta -= 180.0;
  e.theta = theta;
  return e;
}

double coherence(const EigenPair& e) noexcept {
  const double s1 = std::sqrt(std::max(0.0, e.lambda1)), s2 = std::sqrt(std::max(0.0, e.lambda2));
  if (s1 + s2 == 0.0) return 0.0;
  return std::clamp((s1 - s2) / (s1 + s2), 0.0, 1.0);
}

GradientKey hash_key(const EigenPair& e, const Quantizer& q) noexcept {
  GradientKey k;
  k.angle = std::clamp(int(std::floor(e.theta / (180.0 / q.angle_bins))), 0, q.angle_bins - 1);
  const double strength = std::sqrt(std::max(0.0, e.lambda1));
  for (double t : q.strength_thresholds) k.strength += t < strength ? 1 : 0;
  const double mu = coherence(e);
  for (double t : q.coherence_thresholds) k.coherence += t < mu ? 1 : 0;
  return k;
}

namespace {

// Separable smoothing with edge replication, the field analogue of the
// per-pixel window sum in structure_tensor().
ImagePlane smooth(const ImagePlane& p, const std::vector<double>& k) {
  const int half = int(k.size()) / 2, w = p.width(), h = p.height();
  ImagePlane tmp(w, h), out(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0;
      for (int j = 0; j < int(k.size()); ++j) acc += k[j] * p.clamped(r, c + j - half);
      tmp(r, c) = acc;
    }
  }
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0;
      for (int i = 0; i < int(k.size()); ++i) acc += k[i] * tmp.clamped(r + i - half, c);
      out(r, c) = acc;
    }
  }
  return out;
}

}  // namespace

std::vector<std::int32_t> compute_key_map(const ImagePlane& p, const Quantizer& q, const HashWindow& window) {
  const GradientField f = compute_gradients(p);
  const int w = p.width(), h = p.height();
  ImagePlane xx(w, h), xy(w, h), yy(w, h);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double gx = f.gx.data()[i], gy = f.gy.data()[i];
    xx.data()[i] = gx * gx;
    xy.data()[i] = gx * gy;
    yy.data()[i] = gy * gy;
  }
  const std::vector<double> k = gaussian_window(window.size, window.sigma);
  const ImagePlane a = smooth(xx, k), b = smooth(xy, k), c = smooth(yy, k);
  std::vector<std::int32_t> keys(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const EigenPair e = eigen2x2({a.data()[i], b.data()[i], c.data()[i]});
    keys[i] = key_index(hash_key(e, q), q);
  }
  return keys;
}

}  // namespace raisr
