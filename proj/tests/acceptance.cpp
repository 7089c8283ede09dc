// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "scfo/correlator.hpp"
#include "scfo/hwestimate.hpp"
#include "scfo/polyphase.hpp"
#include "scfo/random.hpp"
#include "scfo/scenarios.hpp"
#include "scfo/timing.hpp"

using namespace scfo;

namespace {

constexpr double kPi = std::numbers::pi;
const RationalFreq kFc(Rational(1000000));

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

SampleStream noise_stream(const RationalFreq& fa, std::int64_t n, std::uint64_t seed) {
  Rng rng(seed);
  SampleStream s;
  s.rate = fa;
  s.epoch = Rational(static_cast<std::int64_t>(seed % 5), 7000000);
  s.data.resize(n);
  for (std::int64_t k = 0; k < n; ++k) s.data[k] = rng.gaussian();
  return s;
}

Outcome crit1() {
  const double a = washing_suppression_db(1e3, 1.0), b = washing_suppression_db(1e3, 0.1),
               c = washing_suppression_db(1e4, 0.14);
  const bool exact = std::abs(a - 37.98) < 0.005 && std::abs(b - 27.98) < 0.005 && std::abs(c - 39.45) < 0.005;
  const bool quoted = std::abs(a - 38.0) <= 0.5 && std::abs(b - 28.0) <= 0.5 && std::abs(c - 40.0) <= 0.5;
  return {exact && quoted, fmt("%.2f", a) + " / " + fmt("%.2f", b) + " / " + fmt("%.2f", c) + " dB"};
}

Outcome crit2() {
  WashoutConfig cfg;
  Outcome o{true, ""};
  for (double dwt : {1e2, 1e3, 1e4}) {
    const WashoutPoint p = washout_point(dwt, cfg);
    const bool ok = p.starts.size() >= 16 && std::abs(p.excess_db) <= 3.0 && p.sky_min > 0.99;
    o.pass = o.pass && ok;
    o.detail += "dwt=" + fmt("%g", dwt) + ": excess " + fmt("%+.2f", p.excess_db) + " dB, sky " + fmt("%.6f", p.sky_min) +
                ", windows " + std::to_string(p.starts.size()) + "; ";
  }
  return o;
}

Outcome crit3() {
  const double l = coherence_loss(kPi / 1024.0);
  return {std::abs(l / 1.57e-6 - 1.0) <= 0.02, fmt("%.4g", l)};
}

Outcome crit4() {
  SensitivityConfig sc;
  ChainSpec direct;
  direct.name = "4-bit direct";
  direct.adc = {QuantKind::Q4Optimal};
  ChainSpec resampled = direct;
  resampled.name = "4-bit resampled 8-bit";
  resampled.resample = true;
  resampled.requant = {QuantKind::Q8Uniform, 2.0};
  const std::int64_t n = 100000000;
  const SensitivityReport r = sensitivity_loss(1, direct, resampled, n, sc);
  const double d = 100.0 * r.diff, se = 100.0 * r.diff_stderr;
  return {r.n >= n && std::abs(d - 0.0375) <= 0.02 && se < 0.005,
          "diff " + fmt("%.4f", d) + "% +/- " + fmt("%.4f", se) + "% (direct " + fmt("%.4f", 100 * r.a.loss) +
              "%, resampled " + fmt("%.4f", 100 * r.b.loss) + "%, " + fmt("%.0f", static_cast<double>(r.n)) +
              " samples)"};
}

Outcome crit5() {
  WindowSpec loose;
  loose.ripple_bound_db = std::numeric_limits<double>::infinity();
  const CoefficientBank b9 = design_bank(9, 1024, 19, 0.0833, 0.9167, loose);
  struct Shape {
    int k;
    const CoefficientBank* bank;
  };
  const std::vector<Shape> shapes{{1, &default_bank()}, {3, &b9}, {4, &default_bank()}, {8, &default_bank()}};
  int runs = 0, failed = 0;
  std::int64_t events = 0;
  for (const Shape& s : shapes)
    for (const char* r : {"1", "1001/1000", "999/1000"})
      for (std::uint64_t seed : {1, 2, 3}) {
        const RationalFreq fa(kFc.hz() * Rational::parse(r));
        const SampleStream in = noise_stream(fa, 100200, seed * 31 + static_cast<std::uint64_t>(s.k));
        ResampleOptions o;
        o.requant = {QuantKind::Float};
        o.record_events = true;
        const ResampleResult direct = resample_detailed(in, kFc, *s.bank, o);
        const ResampleResult demux = DemuxResampler(*s.bank, s.k).run(in, kFc, o);
        bool ok = direct.out.size() >= 100000 && demux.out.epoch == direct.out.epoch &&
                  demux.out.data == direct.out.data && demux.stats.skip_events == direct.stats.skip_events &&
                  demux.stats.repeat_events == direct.stats.repeat_events;
        const SampleStream q = quantize(in, {QuantKind::Q8Uniform, 1.0});
        ok = ok && DemuxResampler(*s.bank, s.k).run_fixed(q, kFc).acc == resample_fixed(q, kFc, *s.bank).acc;
        events += direct.stats.skips + direct.stats.repeats;
        ++runs;
        failed += !ok;
      }
  return {failed == 0 && events > 0, std::to_string(runs - failed) + "/" + std::to_string(runs) +
                                         " bit-identical (float and integer paths), " + std::to_string(events) +
                                         " skip/repeat events"};
}

Outcome crit6() {
  const RationalFreq fa(kFc.hz() * Rational(1001, 1000));
  const SampleStream in = noise_stream(fa, 1001000 + 200, 6);
  ResampleOptions o;
  o.requant = {QuantKind::Float};
  o.record_events = true;
  ResampleResult r = resample_detailed(in, kFc, default_bank(), o);
  // Restrict to the first 10^6 outputs.
  ResampleStats s = r.stats;
  s.outputs = 1000000;
  std::erase_if(s.skip_events, [](std::int64_t e) { return e >= 1000000; });
  std::erase_if(s.repeat_events, [](std::int64_t e) { return e >= 1000000; });
  const auto skips = static_cast<std::int64_t>(s.skip_events.size());
  const int n_taps = default_bank().taps, lobe = impulse_width(default_bank(), 0.1);
  const double full = impacted_fraction(s, n_taps), main_lobe = impacted_fraction(s, lobe);
  return {r.stats.outputs >= 1000000 && skips >= 999 && skips <= 1000 && s.repeat_events.empty() && full <= 0.003,
          std::to_string(skips) + " skips; impacted with " + std::to_string(n_taps) + "-sample windows " +
              fmt("%.2f", 100 * full) + "% (limit 0.3%); with the " + std::to_string(lobe) +
              "-tap main lobe (taps >= 10% of peak) " + fmt("%.2f", 100 * main_lobe) + "%"};
}

Outcome crit7() {
  const CoefficientBank& b = default_bank();
  const BankFigures f = analyze_bank(b, 0.0833, 0.9167);
  return {b.taps == 56 && b.phases == 1024 && b.coeff_bits == 19 && f.ripple_db < 0.05 && f.delay_pkpk < 1e-3,
          "ripple " + fmt("%.4f", f.ripple_db) + " dB, delay pk-pk " + fmt("%.3g", f.delay_pkpk) +
              " samples (reference figure 0.2e-4)"};
}

Outcome crit8() {
  const Zone2ShiftResult r = zone2_shift_check(Zone2ShiftConfig{});
  const double lim = std::max(3.0 * r.delay_stderr, 1e-3);
  const double sep_err = std::abs(r.separation_hz - r.expected_separation_hz);
  return {std::abs(r.delay_samples) <= lim && sep_err < r.bin_hz && std::abs(r.separation_hz) > 2.0 * r.bin_hz,
          "slope " + fmt("%.3g", r.delay_samples) + " samples (limit " + fmt("%.3g", lim) + "), clock separation " +
              fmt("%.1f", r.separation_hz) + " Hz vs " + fmt("%.1f", r.expected_separation_hz) + " Hz (bin " +
              fmt("%.2f", r.bin_hz) + " Hz)"};
}

Outcome crit9() {
  const HwEstimate e = estimate(HwConfig{});
  const bool ok = e.multipliers == 3648 && e.mem_blocks == 1856 && e.les >= 160000 && e.les <= 180000 &&
                  std::abs(100 * e.util_mult - 58) <= 1 && std::abs(100 * e.util_mem - 32) <= 1 &&
                  std::abs(100 * e.util_les - 11) <= 1;
  return {ok, std::to_string(e.multipliers) + " multipliers, " + std::to_string(e.mem_blocks) + " memory blocks, " +
                  std::to_string(e.les) + " LEs; " + fmt("%.1f", 100 * e.util_mult) + "% / " +
                  fmt("%.1f", 100 * e.util_mem) + "% / " + fmt("%.1f", 100 * e.util_les) + "%"};
}

Outcome crit10() {
  const RationalFreq fa = RationalFreq::parse("3000000000.1");
  const int ticks = 1001;
  const std::vector<TickRecord> tr = tick_trace(fa, PpsModel{}, ticks);
  std::int64_t lo = INT64_MAX, hi = INT64_MIN, sum = 0;
  for (int i = 1; i < ticks; ++i) {
    lo = std::min(lo, tr[static_cast<std::size_t>(i)].count);
    hi = std::max(hi, tr[static_cast<std::size_t>(i)].count);
    sum += tr[static_cast<std::size_t>(i)].count;
  }
  const bool counts_ok = hi == lo + 1;
  const bool mean_ok = Rational(sum, ticks - 1) == fa.hz();
  const std::vector<std::int64_t> kapb = pps_sample_indices(RationalFreq(Rational(100000000)), PpsModel{}, ticks);
  bool kapb_ok = true;
  for (std::size_t i = 1; i < kapb.size(); ++i) kapb_ok = kapb_ok && kapb[i] - kapb[i - 1] == 100000000;
  return {counts_ok && mean_ok && kapb_ok,
          "counts {" + std::to_string(lo) + ", " + std::to_string(hi) + "}, mean over " + std::to_string(ticks - 1) +
              " ticks " + Rational(sum, ticks - 1).str() + ", KAPB " + (kapb_ok ? "1e8 every tick" : "drifts")};
}

Outcome crit11() {
  const ScfoOffResult r = scfo_off_control(ScfoOffConfig{});
  return {r.rel_error <= 0.01, "|rho| " + fmt("%.5f", r.rho_off) + " vs predicted " + fmt("%.5f", r.predicted) +
                                   " (rel err " + fmt("%.2e", r.rel_error) + "); with offsets " + fmt("%.2e", r.rho_on)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> crits{
      {"1 fringe-washing dB", crit1},        {"2 measured washing", crit2},
      {"3 coherence loss", crit3},           {"4 requantization loss", crit4},
      {"5 demux equivalence", crit5},        {"6 skip/repeat accounting", crit6},
      {"7 filter response", crit7},          {"8 zone-2 frequency shift", crit8},
      {"9 resource estimate", crit9},        {"10 timing accounting", crit10},
      {"11 SCFO-off control", crit11},
  };
  int failures = 0;
  for (const auto& [name, fn] : crits) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::printf("%s criterion %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(crits.size()) - failures, crits.size());
  return failures == 0 ? 0 : 1;
}
