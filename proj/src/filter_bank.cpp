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

#include "raisr/filter_bank.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "raisr/error.hpp"

namespace raisr {

void BankConfig::validate() const {
  if (scale < 1 || scale > 15) fail_usage("scale must be in [1,15]");
  if (filter_dim < 1 || filter_dim > 255 || filter_dim % 2 == 0) fail_usage("filter size must be odd and <= 255");
  quantizer.validate();
}

FilterBank::FilterBank(BankConfig config, std::vector<double> taps) : config_(std::move(config)), taps_(std::move(taps)) {
  config_.validate();
  if (taps_.size() != std::size_t(config_.buckets()) * config_.taps())
    fail_usage("filter bank holds " + std::to_string(taps_.size()) + " taps, expected " +
               std::to_string(std::size_t(config_.buckets()) * config_.taps()));
}

FilterBank FilterBank::delta(const BankConfig& config) {
  config.validate();
  const int n = config.taps();
  std::vector<double> taps(std::size_t(config.buckets()) * n, 0.0);
  for (int b = 0; b < config.buckets(); ++b) taps[std::size_t(b) * n + n / 2] = 1.0;
  return FilterBank(config, std::move(taps));
}

namespace {

constexpr char kMagic[8] = {'R', 'A', 'I', 'S', 'R', 'F', 'L', 'T'};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_f64(std::vector<unsigned char>& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
  return v;
}

double get_f64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace

std::size_t bank_file_size(const BankConfig& config) noexcept {
  const std::size_t thresholds = config.quantizer.strength_bins - 1 + config.quantizer.coherence_bins - 1;
  return kBankHeaderBytes + 8 * thresholds + 8 * std::size_t(config.buckets()) * config.taps();
}

std::vector<unsigned char> serialize_bank(const FilterBank& bank) {
  const BankConfig& cfg = bank.config();
  std::vector<unsigned char> out;
  out.reserve(bank_file_size(cfg));
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, kBankFileVersion);
  for (int v : {cfg.scale, cfg.filter_dim, cfg.quantizer.angle_bins, cfg.quantizer.strength_bins,
                cfg.quantizer.coherence_bins, cfg.pixel_types()})
    out.push_back(static_cast<unsigned char>(v));
  out.insert(out.end(), 6, 0);
  for (double t : cfg.quantizer.strength_thresholds) put_f64(out, t);
  for (double t : cfg.quantizer.coherence_thresholds) put_f64(out, t);
  for (double t : bank.all_taps()) put_f64(out, t);
  return out;
}

FilterBank deserialize_bank(std::span<const unsigned char> bytes) {
  if (bytes.size() < kBankHeaderBytes)
    fail_io("bank header truncated: " + std::to_string(bytes.size()) + " of " + std::to_string(kBankHeaderBytes) +
            " bytes");
  const unsigned char* p = bytes.data();
  if (std::memcmp(p, kMagic, 8) != 0) fail_io("bank magic mismatch: not a RAISRFLT file");
  const std::uint32_t version = get_u32(p + 8);
  if (version != kBankFileVersion) fail_io("unsupported bank version " + std::to_string(version));
  BankConfig cfg;
  cfg.scale = p[12];
  cfg.filter_dim = p[13];
  cfg.quantizer.angle_bins = p[14];
  cfg.quantizer.strength_bins = p[15];
  cfg.quantizer.coherence_bins = p[16];
  const int pixel_types = p[17];
  for (int i = 18; i < 24; ++i)
    if (p[i] != 0) fail_io("bank reserved byte " + std::to_string(i) + " is not zero");
  if (cfg.scale < 1) fail_io("bank scale must be >= 1");
  if (cfg.filter_dim % 2 == 0) fail_io("bank filter_dim must be odd");
  if (cfg.quantizer.angle_bins < 1) fail_io("bank angle_bins must be >= 1");
  if (cfg.quantizer.strength_bins < 1) fail_io("bank strength_bins must be >= 1");
  if (cfg.quantizer.coherence_bins < 1) fail_io("bank coherence_bins must be >= 1");
  if (pixel_types != cfg.scale * cfg.scale)
    fail_io("bank pixel_types " + std::to_string(pixel_types) + " does not equal scale^2");
  cfg.quantizer.strength_thresholds.assign(cfg.quantizer.strength_bins - 1, 0.0);
  cfg.quantizer.coherence_thresholds.assign(cfg.quantizer.coherence_bins - 1, 0.0);
  const std::size_t expected = bank_file_size(cfg);
  if (bytes.size() != expected)
    fail_io("bank file length " + std::to_string(bytes.size()) + " does not match header-implied " +
            std::to_string(expected));

  std::size_t off = kBankHeaderBytes;
  for (double& t : cfg.quantizer.strength_thresholds) t = get_f64(p + (off += 8) - 8);
  for (double& t : cfg.quantizer.coherence_thresholds) t = get_f64(p + (off += 8) - 8);
  try {
    cfg.validate();
  } catch (const Error& e) {
    fail_io(std::string("bank thresholds invalid: ") + e.what());
  }
  std::vector<double> taps(std::size_t(cfg.buckets()) * cfg.taps());
  for (std::size_t i = 0; i < taps.size(); ++i) {
    taps[i] = get_f64(p + off + 8 * i);
    if (!std::isfinite(taps[i]))
      fail_io("bank filter " + std::to_string(i / cfg.taps()) + " has a non-finite tap");
  }
  return FilterBank(cfg, std::move(taps));
}

void save_bank(const FilterBank& bank, const std::filesystem::path& path) {
  const auto bytes = serialize_bank(bank);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail_io("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) fail_io("write failed: " + path.string());
}

FilterBank load_bank(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_io("cannot open bank " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_bank(bytes);
}

}  // namespace raisr
