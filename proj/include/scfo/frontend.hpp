#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "scfo/rational.hpp"
#include "scfo/signal.hpp"

namespace scfo {

enum class Zone { Zone1, Zone2 };
enum class QuantKind { Float, Q4Optimal, Q8Uniform };

/// Amplitude quantizer. The quantizer range scales with sigma * loading:
/// Q4Optimal uses the 16 Lloyd-Max levels for a unit Gaussian times that
/// scale; Q8Uniform is a 256-level mid-rise quantizer clipping at
/// +/- 4 * sigma * loading. sigma == 0 means "measure the input RMS".
struct QuantizerSpec {
  QuantKind kind = QuantKind::Float;
  double loading = 1.0;
  double sigma = 0.0;
};

template <typename Data>
struct BasicStream {
  RationalFreq rate;
  Rational epoch;  // exact time of sample 0, seconds
  Data data;
  QuantKind quant = QuantKind::Float;
  Zone zone = Zone::Zone1;
  double quant_scale = 0.0;  // sigma * loading used when quantized
  std::vector<std::int64_t> pps_marks;

  Eigen::Index size() const { return data.size(); }
  Rational time_of(std::int64_t index) const { return epoch + Rational(index) * rate.period(); }
};

using SampleStream = BasicStream<Eigen::VectorXd>;
using ComplexSampleStream = BasicStream<Eigen::VectorXcd>;

/// Independent additive Gaussian noise for one antenna.
struct NoiseSpec {
  double rms = 0.0;
  std::uint64_t seed = 0;
};

/// Digitizes the analytic signal at rate f_a: data[k] = sig(epoch + k / f_a).
///
/// Zone2 requires the signal band to sit inside (f_a/2, f_a), widened on
/// both sides by zone_slack * f_a.
SampleStream sample(const ToneBankSignal& sig, const RationalFreq& f_a, std::int64_t n, Zone zone,
                    const Rational& epoch = Rational{}, const NoiseSpec& noise = {}, double zone_slack = 0.0);

/// Lloyd-Max reconstruction levels for a unit-variance Gaussian, ascending.
/// Computed once by Lloyd iteration to 1e-12 convergence.
const std::vector<double>& lloyd_max_levels(int n_levels);

SampleStream quantize(const SampleStream& s, const QuantizerSpec& q);

/// Element-wise quantizer used by quantize() and by streaming chains.
class Quantizer {
 public:
  Quantizer(QuantKind kind, double scale);
  double operator()(double x) const;
  /// Integer code: level index in [-8, 7] for Q4, [-128, 127] for Q8.
  int code(double x) const;
  double value_of_code(int code) const;
  QuantKind kind() const { return kind_; }
  double scale() const { return scale_; }

 private:
  QuantKind kind_;
  double scale_;
  double step_ = 0.0;
  std::vector<double> levels_;
  std::vector<double> thresholds_;
};

/// Odd-integer representation (2 * code + 1) of Q8Uniform samples, exact in
/// units of half a quantizer step. Used by the fixed-point resampling path.
std::vector<std::int32_t> fixed_codes(const SampleStream& s);

/// Piecewise-linear magnitude response in dB versus Hz. Values outside the
/// listed range hold the end points. -inf dB means full rejection; two points
/// at the same frequency describe a step.
struct FilterSpec {
  std::vector<std::pair<double, double>> points;

  double gain_db(double f_hz) const;
  double gain(double f_hz) const;

  static FilterSpec all_pass() { return {{{0.0, 0.0}}}; }
  static FilterSpec brick_wall(double lo_hz, double hi_hz);
  /// Flat over [lo, hi] falling linearly (in dB) to -atten_db at hi * factor
  /// and lo / factor.
  static FilterSpec relaxed(double lo_hz, double hi_hz, double atten_db, double factor);
};

/// Analog band-limiting of a tone bank, exact per tone.
ToneBankSignal antialias(const ToneBankSignal& sig, const FilterSpec& filt);

/// Little-endian binary stream layout, see docs/formats.md.
void write_stream(std::ostream& os, const SampleStream& s);
void write_stream(std::ostream& os, const ComplexSampleStream& s);
SampleStream read_stream(std::istream& is);
ComplexSampleStream read_complex_stream(std::istream& is);

}  // namespace scfo
