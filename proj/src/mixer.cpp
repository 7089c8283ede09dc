#include "scfo/mixer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scfo/detail/fir_kernel.hpp"
#include "scfo/spectrum.hpp"

namespace scfo {

namespace {

double kaiser_w(double k, double half, double beta) {
  const double r = k / half;
  if (std::abs(r) > 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - r * r)) / std::cyl_bessel_i(0.0, beta);
}

Eigen::VectorXd hilbert_taps(int n, double beta) {
  const int c = (n - 1) / 2;
  Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
  for (int k = 1; k <= c; k += 2) {
    const double v = 2.0 / (std::numbers::pi * k) * kaiser_w(k, c + 1, beta);
    h[c + k] = v;
    h[c - k] = -v;
  }
  return h;
}

// Real amplitude A(w) with H(e^jw) = -j A(w) e^{-jwc}.
double hilbert_amplitude(const Eigen::VectorXd& h, int c, double omega) {
  double a = 0.0;
  for (int k = 1; k <= c; k += 2) a += h[c + k] * std::sin(omega * k);
  return 2.0 * a;
}

double max_gain_error(const Eigen::VectorXd& h, int c, double lo, double hi) {
  double worst = 0.0;
  constexpr int kPoints = 256;
  for (int i = 0; i < kPoints; ++i) {
    const double f = lo + (hi - lo) * i / (kPoints - 1);
    worst = std::max(worst, std::abs(hilbert_amplitude(h, c, std::numbers::pi * f) - 1.0));
  }
  return worst;
}

int128 gcd128(int128 a, int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

int128 mod_pos(int128 a, int128 m) {
  int128 r = a % m;
  return r < 0 ? r + m : r;
}

template <typename Stream>
void shift_marks(const std::vector<std::int64_t>& in, Stream& out, std::int64_t delay, int decim) {
  out.pps_marks.clear();
  for (std::int64_t j : in) {
    const std::int64_t k = j - delay;
    if (k < 0) continue;
    const std::int64_t m = (k + decim / 2) / decim;
    if (m >= out.size()) continue;
    if (out.pps_marks.empty() || out.pps_marks.back() < m) out.pps_marks.push_back(m);
  }
}

}  // namespace

HilbertPair design_hilbert(int n_taps, double band_lo, double band_hi, double min_image_db) {
  if (n_taps < 3 || n_taps % 2 == 0) throw Error(ErrorCode::InvalidArgument, "Hilbert length must be odd and >= 3");
  if (!(band_lo > 0.0 && band_lo < band_hi && band_hi < 1.0))
    throw Error(ErrorCode::InvalidArgument, "Hilbert band must lie within (0, 1)");
  HilbertPair p;
  p.center = (n_taps - 1) / 2;
  double best = INFINITY;
  for (int i = 0; i <= 64; ++i) {
    const double beta = 0.25 * i;
    const Eigen::VectorXd h = hilbert_taps(n_taps, beta);
    const double e = max_gain_error(h, p.center, band_lo, band_hi);
    if (e < best) {
      best = e;
      p.beta = beta;
      p.h = h;
    }
  }
  p.max_gain_error = best;
  p.s = Eigen::VectorXd::Zero(n_taps);
  p.s[p.center] = 1.0;
  // Image of x + jH{x} relative to the wanted sideband: |1 - A| / |1 + A|.
  const double image_db = 20.0 * std::log10(best / (2.0 - best));
  if (image_db > -min_image_db)
    throw Error(ErrorCode::DesignInfeasible, std::to_string(n_taps) + "-tap Hilbert filter reaches only " +
                                                 std::to_string(-image_db) + " dB image rejection");
  return p;
}

Eigen::VectorXd design_halfband(int n_taps, double beta) {
  if (n_taps < 3 || n_taps % 2 == 0) throw Error(ErrorCode::InvalidArgument, "half-band length must be odd and >= 3");
  const int c = (n_taps - 1) / 2;
  Eigen::VectorXd h = Eigen::VectorXd::Zero(n_taps);
  h[c] = 0.5;
  for (int k = 1; k <= c; k += 2) {
    const double v = std::sin(0.5 * std::numbers::pi * k) / (std::numbers::pi * k) * kaiser_w(k, c + 1, beta);
    h[c + k] = v;
    h[c - k] = v;
  }
  return h / h.sum();
}

LutOscillator::LutOscillator(const Rational& freq_hz, const Rational& phase0_cycles, const Rational& t0,
                             const RationalFreq& rate, int lut_bits, int word_bits)
    : entries_(1 << lut_bits) {
  if (lut_bits < 2 || lut_bits > 20) throw Error(ErrorCode::InvalidArgument, "LUT bits must be in [2, 20]");
  if (word_bits < 2 || word_bits > 52) throw Error(ErrorCode::InvalidArgument, "LUT word bits must be in [2, 52]");
  const Rational a = (phase0_cycles + freq_hz * t0).frac();
  const Rational b = (freq_hz / rate.hz()).frac();
  const int128 g = gcd128(a.den(), b.den());
  den_ = (a.den() / g) * b.den();
  rem_ = a.num() * (den_ / a.den());
  step_ = mod_pos(b.num() * (den_ / b.den()), den_);
  const double full = std::ldexp(1.0, word_bits - 1) - 1.0;
  table_.resize(static_cast<std::size_t>(entries_));
  for (int i = 0; i < entries_; ++i) {
    const double ph = 2.0 * std::numbers::pi * i / entries_;
    table_[static_cast<std::size_t>(i)] = {std::nearbyint(std::cos(ph) * full) / full,
                                           std::nearbyint(std::sin(ph) * full) / full};
  }
}

std::complex<double> LutOscillator::next() {
  // Round rem / den * entries to the nearest index.
  const int128 num = rem_ * entries_;
  int128 q = num / den_;
  if ((num - q * den_) * 2 >= den_) ++q;
  last_index_ = static_cast<int>(q % entries_);
  rem_ += step_;
  if (rem_ >= den_) rem_ -= den_;
  return table_[static_cast<std::size_t>(last_index_)];
}

ComplexSampleStream ssb_shift(const SampleStream& in, const MixerConfig& cfg) {
  return ssb_shift(in, cfg, design_hilbert(cfg.hilbert_taps, cfg.band_lo, cfg.band_hi));
}

ComplexSampleStream ssb_shift(const SampleStream& in, const MixerConfig& cfg, const HilbertPair& pair) {
  const int len = static_cast<int>(pair.h.size());
  const int c = pair.center;
  const Eigen::Index n_out = in.size() - len + 1;
  if (n_out < 1) throw Error(ErrorCode::StreamTooShort, "stream shorter than the Hilbert filter");

  ComplexSampleStream out;
  out.rate = in.rate;
  out.zone = in.zone;
  out.epoch = in.epoch + Rational(c) * in.rate.period();
  out.data.resize(n_out);

  const bool reverse = in.zone == Zone::Zone2;
  LutOscillator osc(cfg.extra_rate_hz - cfg.shift_hz, cfg.extra_phase0_cycles, out.epoch, in.rate, cfg.phase_lut_bits,
                    cfg.lut_word_bits);
  const double* x = in.data.data();
  // Convolution: tap m multiplies x[k + len - 1 - m].
  Eigen::VectorXd hr = pair.h.reverse();
  for (Eigen::Index k = 0; k < n_out; ++k) {
    const double* w = x + k;
    const double re = w[c];
    const double im = detail::fir_dot(hr.data(), len, [w](int m) { return w[m]; });
    std::complex<double> z(re, reverse ? -im : im);
    out.data[k] = z * osc.next();
  }
  shift_marks(in.pps_marks, out, c, 1);
  if (!cfg.decimate2) return out;

  const Eigen::VectorXd hb = design_halfband(cfg.halfband_taps);
  const int hl = static_cast<int>(hb.size());
  const int hc = (hl - 1) / 2;
  const Eigen::Index n_f = out.size() - hl + 1;
  if (n_f < 2) throw Error(ErrorCode::StreamTooShort, "stream shorter than the half-band filter");
  ComplexSampleStream dec;
  dec.rate = RationalFreq(in.rate.hz() / Rational(2));
  dec.zone = out.zone;
  dec.epoch = out.epoch + Rational(hc) * in.rate.period();
  dec.data.resize((n_f + 1) / 2);
  const Eigen::VectorXd hbr = hb.reverse();
  for (Eigen::Index k = 0; k < dec.size(); ++k) {
    const std::complex<double>* w = out.data.data() + 2 * k;
    const double re = detail::fir_dot(hbr.data(), hl, [w](int m) { return w[m].real(); });
    const double im = detail::fir_dot(hbr.data(), hl, [w](int m) { return w[m].imag(); });
    dec.data[k] = {re, im};
  }
  shift_marks(out.pps_marks, dec, hc, 2);
  return dec;
}

double oscillator_spur_dbc(const Rational& freq_hz, const RationalFreq& rate, int n, int lut_bits, int word_bits) {
  LutOscillator osc(freq_hz, Rational{0}, Rational{0}, rate, lut_bits, word_bits);
  // 4-term Blackman-Harris keeps carrier leakage near -92 dB, below any LUT spur of interest.
  constexpr double a0 = 0.35875, a1 = 0.48829, a2 = 0.14128, a3 = 0.01168;
  constexpr Eigen::Index kGuard = 8;
  Eigen::VectorXcd z(n);
  for (int k = 0; k < n; ++k) {
    const double x = 2.0 * std::numbers::pi * k / n;
    const double w = a0 - a1 * std::cos(x) + a2 * std::cos(2 * x) - a3 * std::cos(3 * x);
    z[k] = w * osc.next();
  }
  const Eigen::VectorXcd spec = fft(z);
  const Eigen::Index peak = peak_bin(spec, 0, n);
  const double carrier = std::norm(spec[peak]);
  double spur = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index d = std::abs(k - peak);
    d = std::min(d, n - d);
    if (d > kGuard) spur = std::max(spur, std::norm(spec[k]));
  }
  return 10.0 * std::log10(std::max(spur, 1e-300) / carrier);
}

}  // namespace scfo
