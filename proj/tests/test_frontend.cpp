#include "doctest.h"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "scfo/frontend.hpp"
#include "scfo/random.hpp"
#include "scfo/spectrum.hpp"

using namespace scfo;

namespace {

// Distortion of a quantizer with the given levels on a unit Gaussian, by
// midpoint-rule integration over +/- 10 sigma.
double gaussian_distortion(const std::vector<double>& y) {
  auto q = [&](double x) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < y.size(); ++i)
      if (std::abs(x - y[i]) < std::abs(x - y[best])) best = i;
    return y[best];
  };
  const int n = 400000;
  const double h = 20.0 / n;
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -10.0 + (i + 0.5) * h;
    const double e = x - q(x);
    d += e * e * std::exp(-0.5 * x * x) * h;
  }
  return d / std::sqrt(2.0 * std::numbers::pi);
}

Eigen::Index peak_of(const SampleStream& s) {
  const Eigen::VectorXcd spec = fft(Eigen::VectorXd(s.data.cwiseProduct(hann_window(s.data.size()))));
  return peak_bin(spec, 1, spec.size() / 2);
}

}  // namespace

TEST_CASE("Lloyd-Max 16-level levels match the classical table") {
  const std::vector<double> oracle{0.1284, 0.3881, 0.6568, 0.9424, 1.2562, 1.6181, 2.0690, 2.7326};
  const std::vector<double>& y = lloyd_max_levels(16);
  REQUIRE(y.size() == 16);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(y[8 + i] == doctest::Approx(oracle[i]).epsilon(5e-4));
    CHECK(y[7 - i] == -y[8 + i]);
  }
}

TEST_CASE("Lloyd-Max levels satisfy the centroid condition") {
  // Independent check: the mean of x over each decision cell equals the level.
  const std::vector<double>& y = lloyd_max_levels(16);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double a = i == 0 ? -12.0 : 0.5 * (y[i - 1] + y[i]);
    const double b = i + 1 == y.size() ? 12.0 : 0.5 * (y[i] + y[i + 1]);
    double num = 0.0, den = 0.0;
    const int n = 20000;
    for (int k = 0; k < n; ++k) {
      const double x = a + (b - a) * (k + 0.5) / n;
      const double w = std::exp(-0.5 * x * x);
      num += x * w;
      den += w;
    }
    CHECK(num / den == doctest::Approx(y[i]).epsilon(1e-6));
  }
}

TEST_CASE("Q4 correlation efficiency against the 1 - D oracle") {
  const double oracle = 1.0 - gaussian_distortion(lloyd_max_levels(16));
  CHECK(oracle == doctest::Approx(0.9905).epsilon(2e-4));

  Rng rng(11);
  const double r = 0.1;
  const std::int64_t n = 4000000;
  SampleStream a, b;
  a.data.resize(n);
  b.data.resize(n);
  for (std::int64_t k = 0; k < n; ++k) {
    const double c = rng.gaussian();
    a.data[k] = std::sqrt(r) * c + std::sqrt(1 - r) * rng.gaussian();
    b.data[k] = std::sqrt(r) * c + std::sqrt(1 - r) * rng.gaussian();
  }
  const QuantizerSpec q4{QuantKind::Q4Optimal, 1.0, 1.0};
  const SampleStream qa = quantize(a, q4), qb = quantize(b, q4);
  auto rho = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm()); };
  const double eff = rho(qa.data, qb.data) / rho(a.data, b.data);
  CHECK(eff == doctest::Approx(oracle).epsilon(3e-3));
  // The often-quoted rounded figure for optimal 4-bit sampling.
  CHECK(std::abs(eff - 0.988) < 0.005);
  std::set<double> distinct(qa.data.begin(), qa.data.end());
  CHECK(distinct.size() <= 16);
}

TEST_CASE("Q8 uniform mid-rise quantizer") {
  const Quantizer q(QuantKind::Q8Uniform, 1.0);
  const double step = 8.0 / 256.0;
  CHECK(std::abs(q(0.0)) == doctest::Approx(step / 2));
  CHECK(q(100.0) == doctest::Approx(127.5 * step));
  CHECK(q(-100.0) == doctest::Approx(-127.5 * step));
  CHECK(q.code(100.0) == 127);
  CHECK(q.code(-100.0) == -128);
  for (int c = -128; c < 128; ++c) {
    CHECK(q.value_of_code(c) == doctest::Approx((c + 0.5) * step));
    CHECK(q.code(q.value_of_code(c)) == c);
  }

  SampleStream s;
  s.data = Eigen::VectorXd::Constant(100, 50.0);
  const SampleStream out = quantize(s, {QuantKind::Q8Uniform, 1.0, 1.0});
  CHECK((out.data.array() == 127.5 * step).all());
}

TEST_CASE("quantization is idempotent on its own levels") {
  Rng rng(2);
  SampleStream s;
  s.data.resize(5000);
  for (Eigen::Index k = 0; k < s.data.size(); ++k) s.data[k] = rng.gaussian();
  for (QuantKind kind : {QuantKind::Q4Optimal, QuantKind::Q8Uniform}) {
    const SampleStream q = quantize(s, {kind, 1.5, 1.0});
    const Quantizer again(kind, q.quant_scale);
    for (Eigen::Index k = 0; k < q.data.size(); ++k) CHECK(again(q.data[k]) == q.data[k]);
    try {
      quantize(q, {kind, 1.0});
      FAIL("expected AlreadyQuantized");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::AlreadyQuantized);
    }
  }
}

TEST_CASE("fixed codes are odd half-step integers") {
  Rng rng(3);
  SampleStream s;
  s.data.resize(1000);
  for (Eigen::Index k = 0; k < s.data.size(); ++k) s.data[k] = rng.gaussian();
  const SampleStream q = quantize(s, {QuantKind::Q8Uniform, 1.0, 1.0});
  const std::vector<std::int32_t> c = fixed_codes(q);
  const double half = 0.5 * 8.0 * q.quant_scale / 256.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    CHECK(c[k] % 2 != 0);
    CHECK(c[k] * half == doctest::Approx(q.data[static_cast<Eigen::Index>(k)]));
  }
  CHECK_THROWS_AS(fixed_codes(s), Error);
}

TEST_CASE("sampling places tones at the expected bins") {
  const RationalFreq fa(Rational(1024));
  const ToneBankSignal z1({Tone{1.0, 0.3 * 1024, 0.0}}, Band{0, 512});
  CHECK(peak_of(sample(z1, fa, 1024, Zone::Zone1)) == 307);

  const ToneBankSignal z2({Tone{1.0, 0.7 * 1024, 0.0}}, Band{600, 1000});
  const SampleStream s2 = sample(z2, fa, 1024, Zone::Zone2);
  CHECK(s2.zone == Zone::Zone2);
  CHECK(peak_of(s2) == 1024 - 717);

  CHECK_THROWS_AS(sample(z1, fa, 16, Zone::Zone2), Error);
  const ToneBankSignal dc({Tone{0.5, 0.0, std::numbers::pi / 2}}, Band{0, 0});
  const SampleStream d = sample(dc, fa, 64, Zone::Zone1);
  CHECK((d.data.array() - 0.5).abs().maxCoeff() < 1e-15);
}

TEST_CASE("zone 2 sampling reverses spectral order") {
  const RationalFreq fa(Rational(4096));
  const ToneBankSignal two({Tone{1.0, 2600.0, 0.0}, Tone{0.3, 3400.0, 0.0}}, Band{2100, 4000});
  const SampleStream s = sample(two, fa, 4096, Zone::Zone2);
  const Eigen::VectorXcd spec = fft(Eigen::VectorXd(s.data));
  // Strong tone at 4096 - 2600 = 1496, weak one at 696: the order is reversed.
  CHECK(peak_bin(spec, 1, 2048) == 1496);
  CHECK(std::abs(spec[696]) > 100.0 * std::abs(spec[1000]));
  CHECK(std::abs(spec[696]) < std::abs(spec[1496]));
}

TEST_CASE("sampled values equal eval at exact times") {
  const ToneBankSignal sig({Tone{1.0, 123.456, 0.1}, Tone{0.2, 300.0, 1.0}}, Band{0, 500});
  const RationalFreq fa = RationalFreq::parse("1000.5");
  const Rational epoch(3, 11);
  const SampleStream s = sample(sig, fa, 2000, Zone::Zone1, epoch);
  for (Eigen::Index k = 0; k < s.data.size(); k += 37) CHECK(s.data[k] == doctest::Approx(sig.eval(s.time_of(k))).epsilon(1e-12));
}

TEST_CASE("filters scale tone amplitudes") {
  const ToneBankSignal sig({Tone{1.0, 1e9, 0.0}, Tone{1.0, 3.3e9, 0.0, true}}, Band{0.25e9, 2.75e9});
  CHECK(antialias(sig, FilterSpec::all_pass()) == sig);
  const ToneBankSignal bw = antialias(sig, FilterSpec::brick_wall(0.25e9, 2.75e9));
  CHECK(bw.tones()[0].amplitude == 1.0);
  CHECK(bw.tones()[1].amplitude == 0.0);
  const FilterSpec relaxed = FilterSpec::relaxed(0.25e9, 2.75e9, 20.0, 1.2);
  const ToneBankSignal rl = antialias(sig, relaxed);
  CHECK(rl.tones()[1].amplitude == doctest::Approx(0.1));
  CHECK(relaxed.gain_db(1.1 * 2.75e9) == doctest::Approx(-10.0));
}

TEST_CASE("stream file round trip") {
  Rng rng(4);
  SampleStream s;
  s.rate = RationalFreq::parse("3000000000.1");
  s.epoch = Rational(7, 3);
  s.zone = Zone::Zone2;
  s.data.resize(300);
  for (Eigen::Index k = 0; k < s.data.size(); ++k) s.data[k] = rng.gaussian();
  s.pps_marks = {3, 150, 299};
  for (QuantKind kind : {QuantKind::Float, QuantKind::Q8Uniform, QuantKind::Q4Optimal}) {
    const SampleStream in = quantize(s, {kind, 1.0, 1.0});
    std::stringstream ss;
    write_stream(ss, in);
    const SampleStream r = read_stream(ss);
    CHECK(r.rate == in.rate);
    CHECK(r.epoch == in.epoch);
    CHECK(r.zone == in.zone);
    CHECK(r.quant == in.quant);
    CHECK(r.pps_marks == in.pps_marks);
    if (kind == QuantKind::Float)
      CHECK((r.data - in.data).cwiseAbs().maxCoeff() < 1e-6);
    else
      CHECK(r.data == in.data);
  }

  ComplexSampleStream c;
  c.rate = RationalFreq(Rational(1000));
  c.data = Eigen::VectorXcd::Random(50);
  std::stringstream cs;
  write_stream(cs, c);
  const ComplexSampleStream rc = read_complex_stream(cs);
  CHECK((rc.data - c.data).cwiseAbs().maxCoeff() < 1e-6);

  std::stringstream bad("NOPE");
  CHECK_THROWS_AS(read_stream(bad), Error);
  std::stringstream real;
  write_stream(real, s);
  CHECK_THROWS_AS(read_complex_stream(real), Error);
}
