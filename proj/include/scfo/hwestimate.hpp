#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace scfo {

struct HwConfig {
  int taps = 56;
  int demux = 8;
  int streams = 4;
  bool complex_output = true;
  bool share_coeff_luts = true;
  int sample_bits = 8;
  int coeff_lut_entries = 1024;
  int coeff_word_bits = 20;
  int mixer_mults_per_stream = -1;  // -1: 2k for complex output, k for real
  int mixer_lut_entries = 1024;
  int mixer_word_bits = 20;
  int adders_per_fir = -1;  // -1: one per tap
  double adder_avg_bits = 37.0;
  double pipeline_factor = 2.0;
  std::int64_t misc_les = 20000;
  double sample_rate_hz = 6e9;  // per stream, for the ops/s figure
};

/// Resource totals of an FPGA part. Loaded from "key value" lines.
struct DeviceTable {
  std::string name = "GX1650";
  std::int64_t multipliers = 6290;
  std::int64_t mem_blocks = 5851;
  std::int64_t les = 1624000;
  int mem_block_entries = 1024;  // words per block
  int mem_block_bits = 20;       // bits per word
};

DeviceTable read_device_table(std::istream& is);
void write_device_table(std::ostream& os, const DeviceTable& dev);

struct HwEstimate {
  std::int64_t fir_mults = 0;
  std::int64_t mixer_mults = 0;
  std::int64_t multipliers = 0;
  std::int64_t coeff_mems = 0;
  std::int64_t mixer_mems = 0;
  std::int64_t mem_blocks = 0;
  std::int64_t adder_les = 0;
  std::int64_t shift_reg_les = 0;
  std::int64_t misc_les = 0;
  std::int64_t les = 0;
  double util_mult = 0.0;
  double util_mem = 0.0;
  double util_les = 0.0;
  double fir_clock_hz = 0.0;
  double mult_ops_per_s = 0.0;  // FIR multiplies per second, all streams
};

HwEstimate estimate(const HwConfig& cfg, const DeviceTable& dev = {});

/// The only power figure on record; power is not modelled.
inline constexpr const char* kPowerCitation = "power not modelled; quoted range for the Band 5 resampler FPGA: 20-50 W";

}  // namespace scfo
