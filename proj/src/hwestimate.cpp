#include "scfo/hwestimate.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "scfo/error.hpp"

namespace scfo {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

std::int64_t blocks_per_memory(const DeviceTable& dev, int entries, int bits) {
  return ceil_div(entries, dev.mem_block_entries) * ceil_div(bits, dev.mem_block_bits);
}

}  // namespace

DeviceTable read_device_table(std::istream& is) {
  DeviceTable d;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    auto bad = [&] { return Error(ErrorCode::ParseError, "device table line " + std::to_string(line_no) + ": " + key); };
    if (key == "name") {
      if (!(ls >> d.name)) throw bad();
      continue;
    }
    std::int64_t v;
    if (!(ls >> v) || v <= 0) throw bad();
    if (key == "multipliers") d.multipliers = v;
    else if (key == "mem_blocks") d.mem_blocks = v;
    else if (key == "les") d.les = v;
    else if (key == "mem_block_entries") d.mem_block_entries = static_cast<int>(v);
    else if (key == "mem_block_bits") d.mem_block_bits = static_cast<int>(v);
    else throw bad();
  }
  return d;
}

void write_device_table(std::ostream& os, const DeviceTable& d) {
  os << "name " << d.name << "\nmultipliers " << d.multipliers << "\nmem_blocks " << d.mem_blocks << "\nles " << d.les
     << "\nmem_block_entries " << d.mem_block_entries << "\nmem_block_bits " << d.mem_block_bits << '\n';
}

HwEstimate estimate(const HwConfig& c, const DeviceTable& dev) {
  if (c.taps < 1 || c.demux < 1 || c.streams < 0 || c.sample_bits < 1 || c.coeff_lut_entries < 1 ||
      c.coeff_word_bits < 1 || c.mixer_lut_entries < 1 || c.mixer_word_bits < 1 || c.adder_avg_bits < 0.0 ||
      c.pipeline_factor < 0.0 || c.misc_les < 0)
    throw Error(ErrorCode::InvalidArgument, "hardware config has a non-positive size");
  const std::int64_t n = c.taps, k = c.demux, s = c.streams;
  const std::int64_t fir_copies = c.complex_output ? 2 : 1;
  const std::int64_t lut_copies = c.complex_output && !c.share_coeff_luts ? 2 : 1;
  const std::int64_t mix_per_stream =
      c.mixer_mults_per_stream >= 0 ? c.mixer_mults_per_stream : (c.complex_output ? 2 * k : k);
  const std::int64_t adders = c.adders_per_fir >= 0 ? c.adders_per_fir : n;

  HwEstimate e;
  e.fir_mults = n * k * fir_copies * s;
  e.mixer_mults = mix_per_stream * s;
  e.multipliers = e.fir_mults + e.mixer_mults;
  e.coeff_mems = n * k * lut_copies * s * blocks_per_memory(dev, c.coeff_lut_entries, c.coeff_word_bits);
  e.mixer_mems = e.mixer_mults * blocks_per_memory(dev, c.mixer_lut_entries, c.mixer_word_bits);
  e.mem_blocks = e.coeff_mems + e.mixer_mems;
  e.adder_les = std::llround(static_cast<double>(adders) * c.adder_avg_bits * static_cast<double>(k * s) * c.pipeline_factor);
  e.shift_reg_les = n * c.sample_bits * k * s;
  e.misc_les = c.misc_les;
  e.les = e.adder_les + e.shift_reg_les + e.misc_les;
  e.util_mult = static_cast<double>(e.multipliers) / static_cast<double>(dev.multipliers);
  e.util_mem = static_cast<double>(e.mem_blocks) / static_cast<double>(dev.mem_blocks);
  e.util_les = static_cast<double>(e.les) / static_cast<double>(dev.les);
  e.fir_clock_hz = c.sample_rate_hz / static_cast<double>(k);
  e.mult_ops_per_s = static_cast<double>(e.fir_mults) * e.fir_clock_hz;
  return e;
}

}  // namespace scfo
