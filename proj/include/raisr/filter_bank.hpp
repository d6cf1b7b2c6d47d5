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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "raisr/hashing.hpp"

namespace raisr {

/// Shape shared by accumulators and filter banks.
struct BankConfig {
  int scale = 2;
  int filter_dim = 11;  // odd
  Quantizer quantizer;

  int pixel_types() const noexcept { return scale * scale; }
  int taps() const noexcept { return filter_dim * filter_dim; }
  /// Number of (key, pixel type) slots.
  int buckets() const noexcept { return quantizer.key_count() * pixel_types(); }
  int bucket_index(int key, int pixel_type) const noexcept { return key * pixel_types() + pixel_type; }

  void validate() const;
  friend bool operator==(const BankConfig&, const BankConfig&) = default;
};

/// Learned hash table: one d*d filter per (key, pixel type), row-major taps.
class FilterBank {
 public:
  FilterBank(BankConfig config, std::vector<double> taps);

  /// Every filter is the centered delta (passthrough).
  static FilterBank delta(const BankConfig& config);

  const BankConfig& config() const noexcept { return config_; }
  std::span<const double> filter(int bucket) const noexcept {
    return {taps_.data() + std::size_t(bucket) * config_.taps(), std::size_t(config_.taps())};
  }
  std::span<double> filter(int bucket) noexcept {
    return {taps_.data() + std::size_t(bucket) * config_.taps(), std::size_t(config_.taps())};
  }
  std::span<const double> filter(const GradientKey& key, int pixel_type) const noexcept {
    return filter(config_.bucket_index(key_index(key, config_.quantizer), pixel_type));
  }
  std::span<const double> all_taps() const noexcept { return taps_; }

  friend bool operator==(const FilterBank&, const FilterBank&) = default;

 private:
  BankConfig config_;
  std::vector<double> taps_;
};

// Binary bank file: "RAISRFLT", u32 version 1, u8 scale, u8 filter_dim,
// u8 angle/strength/coherence bins, u8 pixel types, six zero bytes (24-byte
// header), then f64 strength and coherence thresholds and the filters, all
// little-endian, bucket order (angle, strength, coherence, pixel type).

inline constexpr std::uint32_t kBankFileVersion = 1;
inline constexpr std::size_t kBankHeaderBytes = 24;

std::size_t bank_file_size(const BankConfig& config) noexcept;
std::vector<unsigned char> serialize_bank(const FilterBank& bank);
FilterBank deserialize_bank(std::span<const unsigned char> bytes);
void save_bank(const FilterBank& bank, const std::filesystem::path& path);
FilterBank load_bank(const std::filesystem::path& path);

}  // namespace raisr
