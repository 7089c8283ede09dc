#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "scfo/frontend.hpp"
#include "scfo/rational.hpp"

namespace scfo {

/// Hilbert/delay filter pair of odd length L with centre (L - 1) / 2.
/// h is antisymmetric with zeros at even offsets from the centre; s is the
/// centre-tap impulse, i.e. the matching pure delay.
struct HilbertPair {
  Eigen::VectorXd h;
  Eigen::VectorXd s;
  int center = 0;
  double beta = 0.0;
  double max_gain_error = 0.0;  // max | |H| - 1 | over the design band
};

/// Kaiser-windowed ideal Hilbert transformer. The band is given as fractions
/// of Nyquist. Throws DesignInfeasible when the negative-frequency image of
/// x + jH{x} cannot be held min_image_db below the signal across the band.
HilbertPair design_hilbert(int n_taps, double band_lo = 0.0833, double band_hi = 0.9167, double min_image_db = 60.0);

/// Half-band lowpass (cut-off at a quarter of the sample rate) used before
/// decimation by two. Odd length; zeros at even offsets except the centre.
Eigen::VectorXd design_halfband(int n_taps, double beta = 8.0);

struct MixerConfig {
  Rational shift_hz{0};          // subtracted frequency, f_c - f_a for Zone-2 chains
  int hilbert_taps = 127;
  double band_lo = 0.0833;
  double band_hi = 0.9167;
  int phase_lut_bits = 10;
  int lut_word_bits = 20;
  bool decimate2 = false;
  int halfband_taps = 63;
  Rational extra_rate_hz{0};     // fringe-rotation ramp: extra phase = 2 pi (phase0 + rate t)
  Rational extra_phase0_cycles{0};
};

/// Quadrature oscillator driven by an exact rational phase: the phase in
/// cycles is kept as an integer numerator over a fixed denominator and only
/// the table lookup quantizes it.
class LutOscillator {
 public:
  /// Generates exp(j 2 pi (phase0 + freq * t)) for t = t0 + k / rate.
  LutOscillator(const Rational& freq_hz, const Rational& phase0_cycles, const Rational& t0, const RationalFreq& rate,
                int lut_bits = 10, int word_bits = 20);

  std::complex<double> next();
  int last_index() const { return last_index_; }

 private:
  int128 den_ = 1;
  int128 rem_ = 0;
  int128 step_ = 0;
  int entries_;
  int last_index_ = 0;
  std::vector<std::complex<double>> table_;
};

/// out[k] = analytic(in)[k] * exp(-j 2 pi shift t_k + j extra(t_k)).
///
/// Zone-2 inputs are spectrally reversed by the digitizer, so their analytic
/// signal is conjugated before the shift, which restores the sky ordering.
/// Output sample k represents the exact time out.epoch + k / out.rate; the
/// filter delay is absorbed into the epoch.
ComplexSampleStream ssb_shift(const SampleStream& in, const MixerConfig& cfg);

/// Same transform for several streams sharing one designed filter pair.
ComplexSampleStream ssb_shift(const SampleStream& in, const MixerConfig& cfg, const HilbertPair& pair);

/// Largest spur relative to the carrier, in dBc, of the LUT oscillator at
/// freq_hz / rate over n samples.
double oscillator_spur_dbc(const Rational& freq_hz, const RationalFreq& rate, int n, int lut_bits = 10,
                           int word_bits = 20);

}  // namespace scfo
