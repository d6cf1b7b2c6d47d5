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

#include "raisr/learner.hpp"

#include <algorithm>
#include <numeric>

#include "parallel.hpp"
#include "raisr/error.hpp"
#include "raisr/upscaler.hpp"

namespace raisr {

void extract_patch(const ImagePlane& y, int row, int col, int filter_dim, std::span<double> out) {
  const int half = filter_dim / 2;
  std::size_t k = 0;
  if (row >= half && col >= half && row + half < y.height() && col + half < y.width()) {
    for (int r = row - half; r <= row + half; ++r) {
      const auto src = y.row(r);
      for (int c = col - half; c <= col + half; ++c) out[k++] = src[c];
    }
    return;
  }
  for (int r = row - half; r <= row + half; ++r)
    for (int c = col - half; c <= col + half; ++c) out[k++] = y.clamped(r, c);
}

namespace {

void check_pair(const ImagePlane& y, const ImagePlane& x, int filter_dim, int scale, int stride) {
  if (!y.same_shape(x)) fail_usage("initial and target images differ in size");
  if (filter_dim < 1 || filter_dim % 2 == 0) fail_usage("filter size must be odd");
  if (scale < 1) fail_usage("scale must be >= 1");
  if (stride < 1) fail_usage("stride must be >= 1");
}

}  // namespace

std::vector<TrainingSample> extract_samples(const ImagePlane& y, const ImagePlane& x, const Quantizer& q,
                                            int filter_dim, int scale, int stride, const HashWindow& window) {
  check_pair(y, x, filter_dim, scale, stride);
  q.validate();
  const auto keys = compute_key_map(y, q, window);
  const int half = filter_dim / 2;
  std::vector<TrainingSample> out;
  for (int r = half; r + half < y.height(); r += stride) {
    for (int c = half; c + half < y.width(); c += stride) {
      TrainingSample s;
      s.patch.resize(std::size_t(filter_dim) * filter_dim);
      extract_patch(y, r, c, filter_dim, s.patch);
      s.target = x(r, c);
      s.key = key_from_index(keys[std::size_t(r) * y.width() + c], q);
      s.pixel_type = pixel_type(r, c, scale);
      out.push_back(std::move(s));
    }
  }
  return out;
}

// ---- AccumulatorBank ----------------------------------------------------------

AccumulatorBank::AccumulatorBank(BankConfig config) : config_(std::move(config)) {
  config_.validate();
  taps_ = config_.taps();
  packed_ = std::size_t(taps_) * (taps_ + 1) / 2;
  q_.assign(packed_ * config_.buckets(), 0.0);
  v_.assign(std::size_t(taps_) * config_.buckets(), 0.0);
  count_.assign(config_.buckets(), 0);
}

void AccumulatorBank::accumulate(const TrainingSample& sample) {
  const int key = key_index(sample.key, config_.quantizer);
  if (sample.pixel_type < 0 || sample.pixel_type >= config_.pixel_types() || key < 0 ||
      key >= config_.quantizer.key_count())
    fail_usage("sample key or pixel type out of range");
  accumulate(config_.bucket_index(key, sample.pixel_type), sample.patch, sample.target);
}

void AccumulatorBank::accumulate(int bucket, std::span<const double> patch, double target) {
  const double t[1] = {target};
  accumulate_block(bucket, patch, t);
}

void AccumulatorBank::accumulate_block(int bucket, std::span<const double> patches,
                                       std::span<const double> targets) {
  if (bucket < 0 || bucket >= buckets()) fail_usage("bucket index out of range");
  const int n = taps_;
  const std::size_t k = targets.size();
  if (patches.size() != k * n) fail_usage("patch block does not match target count");
  double* q = q_.data() + std::size_t(bucket) * packed_;
  double* v = v_.data() + std::size_t(bucket) * n;
  // Entry (i, j) receives its products in sample order, exactly as k rank-1
  // updates would; only the loop nest differs.
  for (int i = 0; i < n; ++i) {
    double* row = q + packed_index(n, i, i) - i;  // row[j] is entry (i, j)
    for (std::size_t s = 0; s < k; ++s) {
      const double* p = patches.data() + s * n;
      const double pi = p[i];
      for (int j = i; j < n; ++j) row[j] += pi * p[j];
    }
    for (std::size_t s = 0; s < k; ++s) v[i] += patches[s * n + i] * targets[s];
  }
  count_[bucket] += k;
}

double AccumulatorBank::q(int bucket, int i, int j) const noexcept {
  if (i > j) std::swap(i, j);
  return q_[std::size_t(bucket) * packed_ + packed_index(taps_, i, j)];
}

std::vector<double> AccumulatorBank::dense_q(int bucket) const {
  const int n = taps_;
  std::vector<double> out(std::size_t(n) * n);
  const double* q = q_.data() + std::size_t(bucket) * packed_;
  for (int i = 0; i < n; ++i) {
    const double* row = q + packed_index(n, i, i) - i;
    for (int j = i; j < n; ++j) out[std::size_t(i) * n + j] = out[std::size_t(j) * n + i] = row[j];
  }
  return out;
}

std::uint64_t AccumulatorBank::total_count() const noexcept {
  return std::accumulate(count_.begin(), count_.end(), std::uint64_t{0});
}

std::size_t AccumulatorBank::footprint_bytes() const noexcept {
  return q_.size() * sizeof(double) + v_.size() * sizeof(double) + count_.size() * sizeof(std::uint64_t);
}

void AccumulatorBank::merge_from(const AccumulatorBank& other) {
  if (!(config_ == other.config_)) fail_usage("cannot merge accumulators with different configurations");
  for (std::size_t i = 0; i < q_.size(); ++i) q_[i] += other.q_[i];
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += other.v_[i];
  for (std::size_t i = 0; i < count_.size(); ++i) count_[i] += other.count_[i];
}

AccumulatorBank merge(const AccumulatorBank& a, const AccumulatorBank& b) {
  AccumulatorBank out = a;
  out.merge_from(b);
  return out;
}

void accumulate_pairs(AccumulatorBank& bank, std::span<const TrainingPair> pairs, int stride,
                      const HashWindow& window, int threads) {
  const BankConfig& cfg = bank.config();
  const int d = cfg.filter_dim, half = d / 2, n = cfg.taps();
  for (const auto& p : pairs) check_pair(p.initial, p.target, d, cfg.scale, stride);

  std::vector<std::vector<std::int32_t>> keys(pairs.size());
  detail::parallel_for(int(pairs.size()), threads,
                       [&](int i) { keys[i] = compute_key_map(pairs[i].initial, cfg.quantizer, window); });

  // Per bucket, the (pair, pixel) list in pair-then-raster order.
  struct Site {
    std::int32_t pair;
    std::int32_t pixel;
  };
  std::vector<std::vector<Site>> sites(cfg.buckets());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const ImagePlane& y = pairs[i].initial;
    for (int r = half; r + half < y.height(); r += stride) {
      for (int c = half; c + half < y.width(); c += stride) {
        const int pixel = r * y.width() + c;
        sites[cfg.bucket_index(keys[i][pixel], pixel_type(r, c, cfg.scale))].push_back({std::int32_t(i), pixel});
      }
    }
  }

  constexpr std::size_t kBlock = 64;
  detail::parallel_slices(cfg.buckets(), threads, [&](int, int begin, int end) {
    std::vector<double> patches(kBlock * n), targets(kBlock);
    for (int b = begin; b < end; ++b) {
      const auto& list = sites[b];
      for (std::size_t start = 0; start < list.size(); start += kBlock) {
        const std::size_t k = std::min(kBlock, list.size() - start);
        for (std::size_t s = 0; s < k; ++s) {
          const Site site = list[start + s];
          const TrainingPair& p = pairs[site.pair];
          const int r = site.pixel / p.initial.width(), c = site.pixel % p.initial.width();
          extract_patch(p.initial, r, c, d, std::span<double>(patches.data() + s * n, n));
          targets[s] = p.target(r, c);
        }
        bank.accumulate_block(b, std::span<const double>(patches.data(), k * n),
                              std::span<const double>(targets.data(), k));
      }
    }
  });
}

}  // namespace raisr
