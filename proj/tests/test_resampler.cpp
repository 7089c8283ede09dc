#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "scfo/random.hpp"
#include "scfo/resampler.hpp"
#include "scfo/spectrum.hpp"

using namespace scfo;

namespace {

const RationalFreq kFc(Rational(1000000));
const WindowSpec kNoRippleCheck{WindowKind::Kaiser, std::numeric_limits<double>::quiet_NaN(),
                                 std::numeric_limits<double>::infinity()};

SampleStream tone_stream(double f, const RationalFreq& fa, std::int64_t n, const Rational& epoch = Rational{}) {
  const ToneBankSignal sig({Tone{1.0, f, 0.3}}, Band{0, 0.5 * fa.to_double()});
  return sample(sig, fa, n, Zone::Zone1, epoch);
}

ResampleOptions float_out() {
  ResampleOptions o;
  o.requant = {QuantKind::Float};
  return o;
}

}  // namespace

TEST_CASE("two-tap two-phase bank is a linear interpolator") {
  WindowSpec rect;
  rect.kind = WindowKind::Rectangular;
  rect.ripple_bound_db = INFINITY;
  const CoefficientBank b = design_bank(2, 2, 0, 0.0833, 0.9167, rect);
  // Phase 1 is the zero-delay phase (c = 0.5): the midpoint of the two taps.
  CHECK(b.row(1)[0] == doctest::Approx(0.5));
  CHECK(b.row(1)[1] == doctest::Approx(0.5));
  // Phase 0 delays by c - 1/2 = 0 samples: it picks the first tap.
  CHECK(b.row(0)[0] == doctest::Approx(1.0));
  CHECK(b.row(0)[1] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("prototype follows the windowed-sinc formula") {
  WindowSpec rect;
  rect.kind = WindowKind::Rectangular;
  rect.ripple_bound_db = INFINITY;
  const CoefficientBank b = design_bank(8, 16, 0, 0.0833, 0.9167, rect);
  for (int i = 0; i < 16; i += 5) {
    const double d = (i - 8) / 16.0;
    double sum = 0.0;
    std::vector<double> h(8);
    for (int m = 0; m < 8; ++m) {
      const double x = m - 3.5 - d;
      h[static_cast<std::size_t>(m)] = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
      sum += h[static_cast<std::size_t>(m)];
    }
    for (int m = 0; m < 8; ++m) CHECK(b.row(i)[m] == doctest::Approx(h[static_cast<std::size_t>(m)] / sum).epsilon(1e-12));
  }
}

TEST_CASE("mirror phases are time reverses") {
  const CoefficientBank b = design_bank(56, 64, 0);
  for (int i = 1; i < 64; ++i)
    for (int m = 0; m < 56; ++m) REQUIRE(b.prototype(i, m) == doctest::Approx(b.prototype(64 - i, 55 - m)).epsilon(1e-12));
}

TEST_CASE("default bank: fixed-point invariants") {
  const CoefficientBank& b = default_bank();
  REQUIRE(b.taps == 56);
  REQUIRE(b.phases == 1024);
  REQUIRE(b.coeff_bits == 19);
  const std::int64_t scale = std::int64_t{1} << 18;
  const double tol = std::ldexp(1.0, -(19 - 3));
  for (int i = 0; i < b.phases; ++i) {
    std::int64_t isum = 0;
    double fsum = 0.0;
    for (int m = 0; m < b.taps; ++m) {
      const std::int32_t q = b.fixed_row(i)[m];
      REQUIRE(q >= -scale);
      REQUIRE(q < scale);
      isum += q;
      fsum += b.row(i)[m];
    }
    CHECK(isum == scale);
    CHECK(std::abs(fsum - 1.0) <= tol);
  }
  // Zero-delay phase: symmetric to within 1 LSB.
  for (int m = 0; m < 28; ++m) CHECK(std::abs(b.fixed_row(512)[m] - b.fixed_row(512)[55 - m]) <= 1);
  // Integer-delay phase 0 is a unit impulse one LSB short of full scale.
  CHECK(b.fixed_row(0)[27] == scale - 1);
}

TEST_CASE("zero-delay phase response") {
  const CoefficientBank& b = default_bank();
  const FrequencyResponse r = response(b, 512, 201);
  CHECK(r.freq.front() == 0.0);
  CHECK(r.freq.back() == 1.0);
  const auto half = static_cast<std::size_t>(100);
  CHECK(r.freq[half] == doctest::Approx(0.5));
  CHECK(std::abs(std::pow(10.0, r.mag_db[half] / 20.0) - 1.0) < 1e-4);
  double sum = 0.0;
  for (int m = 0; m < b.taps; ++m) sum += b.row(512)[m];
  CHECK(std::pow(10.0, r.mag_db[0] / 20.0) == doctest::Approx(std::abs(sum)).epsilon(1e-12));

  const CoefficientBank fb = design_bank(56, 1024, 0);
  const FrequencyResponse rf = response(fb, 512, 64);
  for (std::size_t k = 0; k < rf.freq.size(); ++k)
    if (rf.freq[k] >= 0.0833 && rf.freq[k] <= 0.9167) CHECK(std::abs(rf.delay_err[k]) < 1e-9);
}

TEST_CASE("coefficient quantization does not improve delay error") {
  const BankFigures q = analyze_bank(default_bank(), 0.0833, 0.9167, 64, 16);
  const BankFigures f = analyze_bank(design_bank(56, 1024, 0), 0.0833, 0.9167, 64, 16);
  CHECK(q.max_abs_delay >= f.max_abs_delay);
  CHECK(q.delay_pkpk < 1e-3);
  CHECK(q.ripple_db < 0.05);
}

TEST_CASE("design errors") {
  CHECK_THROWS_AS(design_bank(56, 1000, 19), Error);
  WindowSpec tight;
  tight.ripple_bound_db = 1e-9;
  try {
    design_bank(8, 64, 0, 0.0833, 0.9167, tight);
    FAIL("expected DesignInfeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DesignInfeasible);
  }
}

TEST_CASE("identity resampling is exact for odd N") {
  const CoefficientBank b = design_bank(15, 64, 0, 0.0833, 0.9167, kNoRippleCheck);
  Rng rng(1);
  SampleStream in;
  in.rate = kFc;
  in.data.resize(2000);
  for (Eigen::Index k = 0; k < in.data.size(); ++k) in.data[k] = rng.gaussian();
  const ResampleResult r = resample_detailed(in, kFc, b, float_out());
  CHECK(r.stats.skips == 0);
  CHECK(r.stats.repeats == 0);
  REQUIRE(r.out.size() > 1900);
  // Output k represents the same instant as input k + offset.
  const Rational shift = (r.out.epoch - in.epoch) * kFc.hz();
  REQUIRE(shift.is_integer());
  const auto off = static_cast<Eigen::Index>(shift.num());
  CHECK(off == 7);
  for (Eigen::Index k = 0; k < r.out.size(); ++k) REQUIRE(r.out.data[k] == in.data[k + off]);
}

TEST_CASE("absolute tone frequency is preserved") {
  const RationalFreq fa(Rational(1001000));
  const SampleStream in = tone_stream(123456.0, fa, 1 << 17);
  const SampleStream out = resample(in, kFc, default_bank(), float_out());
  const Eigen::Index n = 1 << 16;
  const Eigen::VectorXd seg = out.data.head(n).cwiseProduct(hann_window(n));
  const Eigen::VectorXcd spec = fft(seg);
  const Eigen::Index k = peak_bin(spec, 1, n / 2);
  CHECK(std::abs(static_cast<double>(k) * 1e6 / n - 123456.0) <= 1e6 / n);
}

TEST_CASE("skip and repeat counts over 1e6 outputs") {
  const CoefficientBank b = design_bank(8, 64, 0, 0.0833, 0.9167, kNoRippleCheck);
  for (auto [num, lo, hi, skips] : {std::tuple{1001, 999, 1000, true}, std::tuple{999, 999, 1000, false}}) {
    const RationalFreq fa = make_rational(1000000LL * num, 1000);
    SampleStream in;
    in.rate = fa;
    in.data = Eigen::VectorXd::Zero(1002000);
    ResampleOptions o = float_out();
    o.record_events = true;
    const ResampleResult r = resample_detailed(in, kFc, b, o);
    REQUIRE(r.stats.outputs >= 1000000);
    std::int64_t count = 0;
    for (std::int64_t e : skips ? r.stats.skip_events : r.stats.repeat_events) count += e < 1000000;
    CHECK(count >= lo);
    CHECK(count <= hi);
    CHECK((skips ? r.stats.repeats : r.stats.skips) == 0);
    CHECK(r.stats.fifo_min >= -1);
    CHECK(r.stats.fifo_max <= 1);
  }
}

TEST_CASE("impacted fraction: event windows") {
  ResampleStats st;
  st.outputs = 1000;
  st.skip_events = {100, 102};
  st.repeat_events = {500};
  CHECK(impacted_fraction(st, 4) == doctest::Approx(10.0 / 1000.0));
  CHECK(impacted_fraction(st, 1) == doctest::Approx(3.0 / 1000.0));
  st.skip_events = {0};
  st.repeat_events = {};
  CHECK(impacted_fraction(st, 6) == doctest::Approx(3.0 / 1000.0));
  // Half-sample sinc: |sinc(j + 1/2)| >= 0.1 sinc(1/2) for j + 1/2 <= 5, ten taps.
  CHECK(impulse_width(default_bank(), 0.1) == 10);
  CHECK(impulse_width(default_bank(), 0.0) == 56);
}

TEST_CASE("resample error against the analytic signal") {
  const RationalFreq fa(Rational(1001000));
  const ToneBankSignal sig({Tone{1.0, 0.1e6, 0.3}}, Band{0, 5e5});
  // 4096 phases keep the delay-grid error well below the filter error.
  const SampleStream out = resample(sample(sig, fa, 40000, Zone::Zone1), kFc, design_bank(56, 4096, 0), float_out());
  const ResampleError e = resample_error(sig, out);
  CHECK(e.rms_err < 1e-4);
  CHECK(e.max_err >= e.rms_err);

  const ToneBankSignal silent({Tone{0.0, 1e5, 0.0}}, Band{0, 5e5});
  const SampleStream zero = resample(sample(silent, fa, 4000, Zone::Zone1), kFc, default_bank(), float_out());
  const ResampleError ez = resample_error(silent, zero);
  CHECK(ez.rms_err == 0.0);
  CHECK(ez.max_err == 0.0);

  const SampleStream q = resample(sample(sig, fa, 4000, Zone::Zone1), kFc, default_bank());
  try {
    resample_error(sig, q);
    FAIL("expected ChainWasQuantized");
  } catch (const Error& e2) {
    CHECK(e2.code() == ErrorCode::ChainWasQuantized);
  }
}

TEST_CASE("1024-phase delay grid sets the resample error floor") {
  // Delay rounded to 1/P: uniform error of rms 1 / (P sqrt 12) samples, so the
  // error relative to the tone rms is 2 pi (f / f_s) / (P sqrt 12).
  const RationalFreq fa(Rational(1001000));
  for (double f : {1e5, 2.5e5}) {
    const ToneBankSignal sig({Tone{1.0, f, 0.3}}, Band{0, 5e5});
    const SampleStream out = resample(sample(sig, fa, 40000, Zone::Zone1), kFc, design_bank(56, 1024, 0), float_out());
    const double floor = 2.0 * std::numbers::pi * (f / 1e6) / (1024.0 * std::sqrt(12.0));
    CHECK(resample_error(sig, out).rms_err == doctest::Approx(floor).epsilon(0.1));
  }
}

TEST_CASE("in-band error is bounded away from skip events") {
  const RationalFreq fa(Rational(1001000));
  const ToneBankSignal sig = synth_signal(5, 16, Band{0.1e6, 0.4e6});
  ResampleOptions o = float_out();
  o.record_events = true;
  const ResampleResult r = resample_detailed(sample(sig, fa, 30000, Zone::Zone1), kFc, default_bank(), o);
  CHECK(r.stats.skips >= 25);
  // Ripple 0.05 dB is a relative amplitude error of 0.6%.
  const ResampleError e = resample_error(sig, r.out);
  CHECK(e.max_err < 6e-3 * 4.0);
  CHECK(e.rms_err < 6e-3);
}

TEST_CASE("too-short input") {
  SampleStream in;
  in.rate = kFc;
  in.data = Eigen::VectorXd::Zero(10);
  try {
    resample(in, kFc, default_bank());
    FAIL("expected StreamTooShort");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StreamTooShort);
  }
  in.rate = RationalFreq(Rational(3000000));
  in.data = Eigen::VectorXd::Zero(1000);
  CHECK_THROWS_AS(resample(in, kFc, default_bank()), Error);
}

TEST_CASE("streaming resampler is chunk invariant") {
  const RationalFreq fa(Rational(999000));
  const SampleStream in = tone_stream(2e5, fa, 20000);
  const CoefficientBank& b = default_bank();
  std::vector<double> whole, parts;
  StreamingResampler<double> r1(b, fa, in.epoch, kFc), r2(b, fa, in.epoch, kFc);
  r1.push(std::span<const double>(in.data.data(), 20000), whole);
  Rng rng(8);
  for (std::int64_t pos = 0; pos < 20000;) {
    const std::int64_t len = std::min<std::int64_t>(20000 - pos, 1 + static_cast<std::int64_t>(rng.bits() % 3000));
    r2.push(std::span<const double>(in.data.data() + pos, static_cast<std::size_t>(len)), parts);
    pos += len;
  }
  CHECK(whole == parts);
  CHECK(r1.stats().repeats == r2.stats().repeats);
}

TEST_CASE("fixed-point path tracks the float path") {
  const RationalFreq fa(Rational(1001000));
  Rng rng(4);
  const ToneBankSignal sig = synth_signal(4, 8, Band{1e5, 4e5});
  const SampleStream q = quantize(sample(sig, fa, 20000, Zone::Zone1), {QuantKind::Q8Uniform, 1.0});
  const FixedResampleResult fx = resample_fixed(q, kFc, default_bank());
  const SampleStream fl = resample(q, kFc, default_bank(), float_out());
  REQUIRE(fx.out.size() == fl.size());
  CHECK(fx.out.epoch == fl.epoch);
  const double step = 8.0 * q.quant_scale / 256.0;
  CHECK((fx.out.data - fl.data).cwiseAbs().maxCoeff() < 1e-9 * step + 1e-12);
  // The raw accumulator is an exact integer sum of codes times taps.
  const std::vector<std::int32_t> codes = fixed_codes(q);
  CHECK(fx.acc.size() == static_cast<std::size_t>(fx.out.size()));
}

TEST_CASE("PPS marks move to the nearest output time") {
  const RationalFreq fa(Rational(1001000));
  SampleStream in = tone_stream(1e5, fa, 30000);
  in.pps_marks = {1000, 12000, 25000};
  const SampleStream out = resample(in, kFc, default_bank(), float_out());
  REQUIRE(out.pps_marks.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const double t_in = in.time_of(in.pps_marks[i]).to_double();
    const double t_out = out.time_of(out.pps_marks[i]).to_double();
    CHECK(std::abs(t_in - t_out) <= 0.5 / 1e6 + 1e-12);
  }
}

TEST_CASE("bank file round trip") {
  const CoefficientBank b = design_bank(56, 32, 16);
  std::stringstream ss;
  write_bank(ss, b);
  const CoefficientBank r = read_bank(ss);
  CHECK(r.taps == 56);
  CHECK(r.phases == 32);
  CHECK(r.coeff_bits == 16);
  CHECK(r.fixed == b.fixed);
  CHECK((r.table - b.table).cwiseAbs().maxCoeff() < 1e-15);

  const CoefficientBank f = design_bank(12, 32, 0, 0.0833, 0.9167, kNoRippleCheck);
  std::stringstream fs;
  write_bank(fs, f);
  const CoefficientBank rf = read_bank(fs);
  CHECK((rf.table - f.table).cwiseAbs().maxCoeff() < 1e-15);

  std::stringstream bad("garbage\n");
  CHECK_THROWS_AS(read_bank(bad), Error);
}
