#include "scfo/spectrum.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "scfo/error.hpp"

namespace scfo {

Eigen::VectorXcd fft(const Eigen::VectorXcd& x) {
  Eigen::FFT<double> engine;
  Eigen::VectorXcd out(x.size());
  engine.fwd(out, x);
  return out;
}

Eigen::VectorXcd fft(const Eigen::VectorXd& x) { return fft(Eigen::VectorXcd(x.cast<std::complex<double>>())); }

Eigen::VectorXd hann_window(Eigen::Index n) {
  Eigen::VectorXd w(n);
  for (Eigen::Index k = 0; k < n; ++k) w[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  return w;
}

Eigen::Index peak_bin(const Eigen::VectorXcd& spectrum, Eigen::Index lo, Eigen::Index hi) {
  Eigen::Index best = lo;
  double best_mag = -1.0;
  for (Eigen::Index k = lo; k < hi; ++k) {
    const double m = std::norm(spectrum[k]);
    if (m > best_mag) {
      best_mag = m;
      best = k;
    }
  }
  return best;
}

Eigen::VectorXcd CrossSpectrum::coherence() const {
  Eigen::VectorXcd c(sab.size());
  for (Eigen::Index k = 0; k < sab.size(); ++k) {
    const double d = std::sqrt(saa[k] * sbb[k]);
    c[k] = d > 0.0 ? sab[k] / d : std::complex<double>(0.0);
  }
  return c;
}

CrossSpectrum cross_spectrum(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, Eigen::Index block, double overlap) {
  if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "cross_spectrum inputs differ in length");
  if (block < 2 || a.size() < block) throw Error(ErrorCode::InsufficientSamples, "cross_spectrum needs at least one block");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw Error(ErrorCode::InvalidArgument, "overlap must be in [0, 1)");
  const Eigen::Index hop = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(static_cast<double>(block) * (1.0 - overlap))));
  const Eigen::VectorXd w = hann_window(block);
  CrossSpectrum cs;
  cs.block = block;
  cs.sab = Eigen::VectorXcd::Zero(block);
  cs.saa = Eigen::VectorXd::Zero(block);
  cs.sbb = Eigen::VectorXd::Zero(block);
  Eigen::FFT<double> engine;
  Eigen::VectorXcd xa(block), xb(block), fa(block), fb(block);
  for (Eigen::Index start = 0; start + block <= a.size(); start += hop) {
    xa = a.segment(start, block).cwiseProduct(w.cast<std::complex<double>>());
    xb = b.segment(start, block).cwiseProduct(w.cast<std::complex<double>>());
    engine.fwd(fa, xa);
    engine.fwd(fb, xb);
    cs.sab += fa.cwiseProduct(fb.conjugate());
    cs.saa += fa.cwiseAbs2();
    cs.sbb += fb.cwiseAbs2();
    ++cs.n_blocks;
  }
  return cs;
}

WelchAccumulator::WelchAccumulator(Eigen::Index block, double overlap)
    : hop_(std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(static_cast<double>(block) * (1.0 - overlap))))),
      window_(hann_window(block)) {
  if (block < 2) throw Error(ErrorCode::InvalidArgument, "Welch block must be >= 2");
  cs_.block = block;
  cs_.sab = Eigen::VectorXcd::Zero(block);
  cs_.saa = Eigen::VectorXd::Zero(block);
  cs_.sbb = Eigen::VectorXd::Zero(block);
  buf_a_.reserve(static_cast<std::size_t>(block));
  buf_b_.reserve(static_cast<std::size_t>(block));
}

void WelchAccumulator::push(std::complex<double> a, std::complex<double> b) {
  buf_a_.push_back(a);
  buf_b_.push_back(b);
  if (static_cast<Eigen::Index>(buf_a_.size()) == cs_.block) flush_block();
}

void WelchAccumulator::flush_block() {
  const Eigen::Index n = cs_.block;
  Eigen::VectorXcd xa(n), xb(n), fa(n), fb(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    xa[k] = buf_a_[static_cast<std::size_t>(k)] * window_[k];
    xb[k] = buf_b_[static_cast<std::size_t>(k)] * window_[k];
  }
  Eigen::FFT<double> engine;
  engine.fwd(fa, xa);
  engine.fwd(fb, xb);
  cs_.sab += fa.cwiseProduct(fb.conjugate());
  cs_.saa += fa.cwiseAbs2();
  cs_.sbb += fb.cwiseAbs2();
  ++cs_.n_blocks;
  buf_a_.erase(buf_a_.begin(), buf_a_.begin() + hop_);
  buf_b_.erase(buf_b_.begin(), buf_b_.begin() + hop_);
}

}  // namespace scfo
