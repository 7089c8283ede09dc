#include "doctest.h"

#include <cmath>
#include <numbers>

#include "scfo/correlator.hpp"
#include "scfo/random.hpp"

using namespace scfo;

namespace {

constexpr double kPi = std::numbers::pi;
const RationalFreq kFc(Rational(1000000));

ComplexSampleStream complex_tone(double f, std::int64_t n, double phase = 0.0) {
  ComplexSampleStream s;
  s.rate = kFc;
  s.data.resize(n);
  for (std::int64_t k = 0; k < n; ++k) s.data[k] = std::polar(1.0, 2.0 * kPi * f * static_cast<double>(k) / 1e6 + phase);
  return s;
}

ComplexSampleStream complex_noise(std::int64_t n, std::uint64_t seed) {
  Rng rng(seed);
  ComplexSampleStream s;
  s.rate = kFc;
  s.data.resize(n);
  for (std::int64_t k = 0; k < n; ++k) s.data[k] = {rng.gaussian(), rng.gaussian()};
  return s;
}

}  // namespace

TEST_CASE("fringe-washing suppression in the envelope convention") {
  CHECK(washing_suppression_db(1e3, 1.0) == doctest::Approx(37.98).epsilon(1e-4));
  CHECK(washing_suppression_db(1e3, 0.1) == doctest::Approx(27.98).epsilon(1e-4));
  // Oracle 10 log10(2 pi df T): 2 pi 1400 = 8796.5, 39.443 dB.
  CHECK(washing_suppression_db(1e4, 0.14) == doctest::Approx(10.0 * std::log10(2.0 * kPi * 1400.0)).epsilon(1e-12));
  // Rounded figures 38 / 28 dB.
  CHECK(std::abs(washing_suppression_db(1e3, 1.0) - 38.0) <= 0.5);
  CHECK(std::abs(washing_suppression_db(1e3, 0.1) - 28.0) <= 0.5);
  CHECK(washing_envelope(1e3, 1.0) == doctest::Approx(1.0 / (2.0 * kPi * 1e3)));
  try {
    washing_suppression_db(0.1, 1.0);
    FAIL("expected EnvelopeRegimeViolated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EnvelopeRegimeViolated);
  }
}

TEST_CASE("coherence loss") {
  CHECK(coherence_loss(0.0) == 0.0);
  CHECK(coherence_loss(kPi / 1024.0) == doctest::Approx(1.57e-6).epsilon(0.02));
  const double x = kPi * 0.875 * 0.2e-4;
  CHECK(coherence_loss(x) == doctest::Approx(x * x / 6.0).epsilon(1e-6));
  CHECK(coherence_loss(x) == doctest::Approx(5.0e-10).epsilon(0.02));
  CHECK(coherence_loss(kPi) == doctest::Approx(1.0));
  CHECK_THROWS_AS(coherence_loss(-1.0), Error);
}

TEST_CASE("identical streams correlate fully") {
  const ComplexSampleStream a = complex_noise(100000, 1);
  const CorrelationReport r = correlate(a, a, 0.1);
  CHECK(r.n_samples == 100000);
  CHECK(std::abs(r.rho - 1.0) < 1e-12);
  CHECK(std::abs(r.suppression_db) < 1e-10);
}

TEST_CASE("independent noise stays under the statistical bound") {
  const CorrelationReport r = correlate(complex_noise(1000000, 2), complex_noise(1000000, 3), 1.0);
  CHECK(std::abs(r.rho) < 5.0 / std::sqrt(1e6));
}

TEST_CASE("two tones follow the discrete washing kernel") {
  const double df = 1000.25;
  const std::int64_t n = 1000000;
  const CorrelationReport r = correlate(complex_tone(50000.0 + df, n), complex_tone(50000.0, n), 1.0);
  // |mean of exp(j w k)| over n samples, w = 2 pi df / f_c.
  const double w = 2.0 * kPi * df / 1e6;
  const double oracle = std::abs(std::sin(0.5 * w * n) / (n * std::sin(0.5 * w)));
  CHECK(std::abs(r.rho) == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(std::abs(r.rho) <= 2.0 / (2.0 * kPi * df * 1.0));
  CHECK(r.suppression_db == doctest::Approx(-10.0 * std::log10(std::abs(r.rho))));
}

TEST_CASE("correlation is scale invariant and bounded") {
  ComplexSampleStream a = complex_noise(50000, 4), b = complex_noise(50000, 5);
  b.data = 0.3 * a.data + b.data;
  const std::complex<double> r0 = correlate(a, b, 0.05).rho;
  ComplexSampleStream a2 = a;
  a2.data *= 1234.5;
  CHECK(std::abs(correlate(a2, b, 0.05).rho - r0) < 1e-14);
  CHECK(std::abs(r0) <= 1.0 + 1e-12);
}

TEST_CASE("accumulator result does not depend on chunking") {
  const ComplexSampleStream a = complex_noise(30000, 6), b = complex_noise(30000, 7);
  CorrelationAccumulator one, many;
  one.add(a.data, b.data);
  Rng rng(1);
  for (Eigen::Index pos = 0; pos < a.size();) {
    const Eigen::Index len = std::min<Eigen::Index>(a.size() - pos, 1 + static_cast<Eigen::Index>(rng.bits() % 7000));
    many.add(a.data.segment(pos, len), b.data.segment(pos, len));
    pos += len;
  }
  CHECK(one.count() == many.count());
  CHECK(one.rho() == many.rho());
}

TEST_CASE("correlate aligns streams by time") {
  ComplexSampleStream a = complex_noise(20000, 8);
  ComplexSampleStream b;
  b.rate = kFc;
  b.epoch = Rational(100) * kFc.period();
  b.data = a.data.segment(100, 19000);
  const CorrelationReport r = correlate(a, b, 0.018);
  CHECK(std::abs(r.rho - 1.0) < 1e-12);
  CHECK(r.n_samples == 18000);
}

TEST_CASE("correlate errors") {
  const ComplexSampleStream a = complex_noise(1000, 9);
  ComplexSampleStream b = a;
  b.rate = RationalFreq(Rational(2000000));
  try {
    correlate(a, b, 0.0005);
    FAIL("expected RateMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RateMismatch);
  }
  try {
    correlate(a, a, 1.0);
    FAIL("expected InsufficientOverlap");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientOverlap);
  }
  CHECK_THROWS_AS(correlate(a, a, 0.0005, 600), Error);
}

TEST_CASE("sensitivity loss of float and 4-bit chains") {
  SensitivityConfig cfg;
  cfg.jobs = 1;
  ChainSpec flt, q4;
  q4.adc = {QuantKind::Q4Optimal, 1.0};
  const std::int64_t n = 2000000;
  const SensitivityReport r = sensitivity_loss(3, flt, q4, n, cfg);
  CHECK(r.n == n);
  CHECK(std::abs(r.a.loss) < 1e-12);
  // 1 - D for the optimal 16-level quantizer.
  CHECK(r.b.loss == doctest::Approx(0.0095).epsilon(0.1));
  CHECK(r.b.std_error < 5e-4);
  CHECK(r.diff == doctest::Approx(r.b.loss - r.a.loss));
  CHECK_FALSE(r.freq_hz.empty());
  CHECK(r.loss_b.size() == r.freq_hz.size());

  SensitivityConfig strict = cfg;
  strict.max_stderr = 1e-9;
  try {
    sensitivity_loss(3, flt, q4, 200000, strict);
    FAIL("expected InsufficientSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientSamples);
  }
}
