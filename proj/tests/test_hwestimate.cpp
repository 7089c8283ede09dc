#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>

#include "scfo/error.hpp"
#include "scfo/hwestimate.hpp"

using namespace scfo;

TEST_CASE("Band 5 golden values") {
  const HwEstimate e = estimate(HwConfig{});
  CHECK(e.fir_mults == 3584);
  CHECK(e.mixer_mults == 64);
  CHECK(e.multipliers == 3648);
  CHECK(e.coeff_mems == 1792);
  CHECK(e.mixer_mems == 64);
  CHECK(e.mem_blocks == 1856);
  // 56 adders x 37 bits x k x streams x pipeline 2.
  CHECK(e.adder_les == 56 * 37 * 8 * 4 * 2);
  CHECK(e.shift_reg_les == 56 * 8 * 8 * 4);
  CHECK(e.misc_les == 20000);
  CHECK(e.les == e.adder_les + e.shift_reg_les + e.misc_les);
  CHECK(e.les >= 160000);
  CHECK(e.les <= 180000);
  CHECK(std::abs(100.0 * e.util_mult - 58.0) <= 1.0);
  CHECK(std::abs(100.0 * e.util_mem - 32.0) <= 1.0);
  CHECK(std::abs(100.0 * e.util_les - 11.0) <= 1.0);
}

TEST_CASE("small real unshared FIR") {
  HwConfig c;
  c.taps = 9;
  c.demux = 3;
  c.streams = 1;
  c.complex_output = false;
  c.share_coeff_luts = false;
  const HwEstimate e = estimate(c);
  CHECK(e.fir_mults == 27);
  CHECK(e.mixer_mults == 3);
  CHECK(e.coeff_mems == 27);
}

TEST_CASE("unshared complex LUTs double the coefficient memories") {
  HwConfig c;
  c.share_coeff_luts = false;
  CHECK(estimate(c).coeff_mems == 2 * 1792);
}

TEST_CASE("FIR multipliers are linear in streams") {
  for (int s : {1, 2, 3, 5}) {
    HwConfig a, b;
    a.streams = s;
    b.streams = 2 * s;
    CHECK(estimate(b).fir_mults == 2 * estimate(a).fir_mults);
  }
  HwConfig z;
  z.streams = 0;
  CHECK(estimate(z).multipliers == 0);
}

TEST_CASE("multiply rate does not depend on k") {
  double ref = -1.0;
  for (int k : {1, 2, 4, 7, 8, 14}) {
    HwConfig c;
    c.demux = k;
    const HwEstimate e = estimate(c);
    CHECK(e.fir_clock_hz == doctest::Approx(6e9 / k));
    if (ref < 0.0) ref = e.mult_ops_per_s;
    CHECK(e.mult_ops_per_s == doctest::Approx(ref));
  }
  CHECK(ref == doctest::Approx(56.0 * 2 * 4 * 6e9));
}

TEST_CASE("device table round trip and custom device") {
  DeviceTable d;
  d.name = "small";
  d.multipliers = 4000;
  d.mem_blocks = 2000;
  d.les = 500000;
  std::stringstream ss;
  write_device_table(ss, d);
  const DeviceTable r = read_device_table(ss);
  CHECK(r.name == "small");
  CHECK(r.multipliers == 4000);
  CHECK(r.mem_blocks == 2000);
  CHECK(r.les == 500000);
  CHECK(estimate(HwConfig{}, r).util_mult == doctest::Approx(3648.0 / 4000.0));

  std::stringstream partial("# only multipliers\nmultipliers 100\n");
  const DeviceTable p = read_device_table(partial);
  CHECK(p.multipliers == 100);
  CHECK(p.mem_blocks == DeviceTable{}.mem_blocks);

  for (const char* bad : {"multipliers abc\n", "bogus 12\n", "multipliers -5\n"}) {
    std::stringstream b(bad);
    CHECK_THROWS_AS(read_device_table(b), Error);
  }
}

TEST_CASE("wider LUT words take more blocks") {
  HwConfig c;
  c.coeff_word_bits = 21;
  CHECK(estimate(c).coeff_mems == 2 * 1792);
  c.coeff_word_bits = 20;
  c.coeff_lut_entries = 2048;
  CHECK(estimate(c).coeff_mems == 2 * 1792);
}

TEST_CASE("power is cited, not estimated") {
  CHECK(std::string(kPowerCitation).find("20-50 W") != std::string::npos);
}
