#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace scfo {

Eigen::VectorXcd fft(const Eigen::VectorXcd& x);
Eigen::VectorXcd fft(const Eigen::VectorXd& x);

Eigen::VectorXd hann_window(Eigen::Index n);

/// Direct DFT of x at `f` cycles per sample.
template <typename Derived>
std::complex<double> dft_at(const Eigen::MatrixBase<Derived>& x, double f) {
  // Phasor recursion re-anchored every 4096 samples.
  std::complex<double> acc = 0.0;
  const Eigen::Index n = x.size();
  for (Eigen::Index start = 0; start < n; start += 4096) {
    const double phase0 = -2.0 * std::numbers::pi * std::fmod(f * static_cast<double>(start), 1.0);
    std::complex<double> z = std::polar(1.0, phase0);
    const std::complex<double> w = std::polar(1.0, -2.0 * std::numbers::pi * f);
    const Eigen::Index end = std::min(n, start + 4096);
    for (Eigen::Index k = start; k < end; ++k) {
      acc += std::complex<double>(x[k]) * z;
      z *= w;
    }
  }
  return acc;
}

/// Index of the largest-magnitude entry in [lo, hi).
Eigen::Index peak_bin(const Eigen::VectorXcd& spectrum, Eigen::Index lo, Eigen::Index hi);

/// Welch-averaged cross and auto spectra with a Hann window.
struct CrossSpectrum {
  Eigen::Index block = 0;
  std::int64_t n_blocks = 0;
  Eigen::VectorXcd sab;  // sum of A * conj(B)
  Eigen::VectorXd saa;
  Eigen::VectorXd sbb;

  /// Normalized coherence per bin.
  Eigen::VectorXcd coherence() const;
};

CrossSpectrum cross_spectrum(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, Eigen::Index block,
                             double overlap = 0.75);

/// Streaming form of cross_spectrum for long runs: samples are pushed in any
/// chunking and the same blocks are transformed.
class WelchAccumulator {
 public:
  WelchAccumulator(Eigen::Index block, double overlap = 0.75);
  void push(std::complex<double> a, std::complex<double> b);
  const CrossSpectrum& result() const { return cs_; }

 private:
  void flush_block();

  Eigen::Index hop_;
  Eigen::VectorXd window_;
  std::vector<std::complex<double>> buf_a_, buf_b_;
  CrossSpectrum cs_;
};

}  // namespace scfo
