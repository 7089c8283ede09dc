#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "scfo/detail/fir_kernel.hpp"
#include "scfo/frontend.hpp"
#include "scfo/rational.hpp"

namespace scfo {

enum class WindowKind { Kaiser, Rectangular };

struct WindowSpec {
  WindowKind kind = WindowKind::Kaiser;
  /// Kaiser shape; NaN selects the value minimizing worst-case delay error
  /// over the passband.
  double beta = std::numeric_limits<double>::quiet_NaN();
  /// Passband magnitude ripple (peak to peak, dB) that the finished bank must
  /// meet. Infinity disables the check.
  double ripple_bound_db = 0.05;
};

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixXi = Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// P phases of N-tap fractional-delay FIRs. Phase i delays by
/// c + (i - P/2) / P samples, c = (N - 1) / 2.
struct CoefficientBank {
  int taps = 0;
  int phases = 0;
  int coeff_bits = 0;  // 0: unquantized
  double beta = 0.0;
  WindowKind window = WindowKind::Kaiser;
  double pass_lo = 0.0833;
  double pass_hi = 0.9167;

  RowMatrixXd prototype;  // unquantized taps, P x N
  RowMatrixXd table;      // taps used by the float path, P x N
  RowMatrixXi fixed;      // integer taps scaled by 2^(coeff_bits - 1); empty if unquantized

  double center() const { return 0.5 * (taps - 1); }
  bool quantized() const { return coeff_bits > 0; }
  const double* row(int phase) const { return table.data() + static_cast<Eigen::Index>(phase) * taps; }
  const std::int32_t* fixed_row(int phase) const { return fixed.data() + static_cast<Eigen::Index>(phase) * taps; }
  /// Offset of the first tap relative to the accumulator base sample.
  int window_offset() const { return -(taps / 2); }
};

/// Designs a windowed-sinc bank. coeff_bits == 0 keeps float taps.
/// Passband edges are fractions of Nyquist.
CoefficientBank design_bank(int taps, int phases, int coeff_bits, double pass_lo = 0.0833, double pass_hi = 0.9167,
                            WindowSpec window = {});

/// Convenience for the default 56 x 1024 x 19-bit design.
const CoefficientBank& default_bank();

struct FrequencyResponse {
  std::vector<double> freq;  // fraction of Nyquist
  std::vector<double> mag_db;
  std::vector<double> delay_err;  // samples, relative to c + d
};

FrequencyResponse response(const CoefficientBank& bank, int phase, int n_freq);

struct BankFigures {
  double ripple_db = 0.0;        // peak-to-peak magnitude over band and phases
  double max_abs_mag_db = 0.0;
  double delay_pkpk = 0.0;       // samples, over band and phases
  double max_abs_delay = 0.0;
};

/// Evaluates every `phase_stride`-th phase on n_freq points inside [lo, hi].
BankFigures analyze_bank(const CoefficientBank& bank, double lo, double hi, int n_freq = 128, int phase_stride = 1);

void write_bank(std::ostream& os, const CoefficientBank& bank);
CoefficientBank read_bank(std::istream& is);
void write_response_csv(std::ostream& os, const FrequencyResponse& r);

/// Where a resampler starts on the absolute output grid t = j / f_c.
struct ResampleGrid {
  std::int64_t first_tick = 0;  // output 0 represents time first_tick / f_c
  Rational ratio;               // f_a / f_c
  Rational start;               // accumulator position of output 0, input samples
};

ResampleGrid resample_grid(const CoefficientBank& bank, const RationalFreq& f_a, const Rational& in_epoch,
                           const RationalFreq& f_c);

struct ResampleStats {
  std::int64_t outputs = 0;
  std::int64_t skips = 0;
  std::int64_t repeats = 0;
  std::int64_t fifo_min = 0;  // FIFO fill relative to its nominal depth
  std::int64_t fifo_max = 0;
  std::vector<std::int64_t> skip_events;    // output indices, when recorded
  std::vector<std::int64_t> repeat_events;
};

/// Streaming f_a -> f_c resampler. Sample = double for the float path or
/// int32_t (odd Q8 codes) for the fixed-point path, which accumulates exactly
/// in 64 bits.
template <typename Sample>
class StreamingResampler {
 public:
  using Acc = std::conditional_t<std::is_floating_point_v<Sample>, double, std::int64_t>;

  StreamingResampler(const CoefficientBank& bank, const RationalFreq& f_a, const Rational& in_epoch,
                     const RationalFreq& f_c, bool record_events = false)
      : bank_(&bank),
        grid_(resample_grid(bank, f_a, in_epoch, f_c)),
        acc_(grid_.ratio, bank.phases, grid_.start),
        f_c_(f_c),
        record_(record_events) {
    if constexpr (!std::is_floating_point_v<Sample>) {
      if (!bank.quantized()) throw Error(ErrorCode::InvalidArgument, "fixed-point path needs a quantized bank");
    }
  }

  const ResampleGrid& grid() const { return grid_; }
  Rational output_epoch() const { return Rational(grid_.first_tick) * f_c_.period(); }
  const ResampleStats& stats() const { return stats_; }
  const PhaseAccumulator& accumulator() const { return acc_; }

  /// Appends input samples and emits every output whose window is complete.
  template <typename Sink>
  void push(std::span<const Sample> in, Sink&& sink) {
    buf_.insert(buf_.end(), in.begin(), in.end());
    const int n = bank_->taps;
    const std::int64_t s0 = bank_->window_offset();
    const std::int64_t avail = buf_start_ + static_cast<std::int64_t>(buf_.size());
    for (;;) {
      const std::int64_t s = acc_.base() + s0;
      if (s + n > avail) break;
      const Sample* x = buf_.data() + (s - buf_start_);
      Acc y;
      if constexpr (std::is_floating_point_v<Sample>)
        y = detail::fir_dot(bank_->row(acc_.lut_index()), n, [x](int m) { return x[m]; });
      else
        y = detail::fir_dot(bank_->fixed_row(acc_.lut_index()), n, [x](int m) { return x[m]; });
      sink(y);
      advance();
    }
    const std::int64_t keep_from = acc_.base() + s0;
    if (keep_from - buf_start_ > 8192) {
      buf_.erase(buf_.begin(), buf_.begin() + (keep_from - buf_start_));
      buf_start_ = keep_from;
    }
  }

  void push(std::span<const Sample> in, std::vector<Acc>& out) {
    push(in, [&out](Acc y) { out.push_back(y); });
  }

 private:
  void advance() {
    const std::int64_t index = stats_.outputs++;
    const AccumulatorStep st = acc_.step();
    if (st.advance == 2) {
      ++stats_.skips;
      if (record_) stats_.skip_events.push_back(index);
    } else if (st.advance == 0) {
      ++stats_.repeats;
      if (record_) stats_.repeat_events.push_back(index);
    }
    // Samples written by now minus the read pointer, relative to nominal.
    const std::int64_t fill = acc_.position_floor() - acc_.base();
    stats_.fifo_min = std::min(stats_.fifo_min, fill);
    stats_.fifo_max = std::max(stats_.fifo_max, fill);
  }

  const CoefficientBank* bank_;
  ResampleGrid grid_;
  PhaseAccumulator acc_;
  RationalFreq f_c_;
  bool record_;
  std::vector<Sample> buf_;
  std::int64_t buf_start_ = 0;
  ResampleStats stats_;
};

struct ResampleOptions {
  QuantizerSpec requant{QuantKind::Q8Uniform};
  bool record_events = false;
};

struct ResampleResult {
  SampleStream out;
  ResampleStats stats;
};

/// Resamples onto the f_c grid. Output sample k represents time
/// out.epoch + k / f_c exactly; only outputs with a full N-tap window are
/// produced. PPS marks move to the output nearest in time.
ResampleResult resample_detailed(const SampleStream& in, const RationalFreq& f_c, const CoefficientBank& bank,
                                 const ResampleOptions& opts = {});

inline SampleStream resample(const SampleStream& in, const RationalFreq& f_c, const CoefficientBank& bank,
                             const ResampleOptions& opts = {}) {
  return resample_detailed(in, f_c, bank, opts).out;
}

struct FixedResampleResult {
  std::vector<std::int64_t> acc;  // raw accumulator, units of (step / 2) * 2^-(bits - 1)
  SampleStream out;               // acc scaled back to signal units, unquantized
  ResampleStats stats;
};

/// Integer path: Q8Uniform input codes times integer taps.
FixedResampleResult resample_fixed(const SampleStream& in, const RationalFreq& f_c, const CoefficientBank& bank,
                                   bool record_events = false);

/// Widest per-phase run of taps, first to last, whose magnitude is at least
/// `rel` of that phase's peak tap.
int impulse_width(const CoefficientBank& bank, double rel = 0.1);

/// Fraction of the outputs within a `width`-sample window around any recorded
/// skip or repeat event (overlapping windows count once).
double impacted_fraction(const ResampleStats& stats, int width);

/// Moves PPS marks from `in` onto `out` by nearest represented time.
void propagate_pps(const SampleStream& in, SampleStream& out);

struct ResampleError {
  double rms_err = 0.0;
  double max_err = 0.0;
};

/// Compares each output sample with the analytic signal at the exact time it
/// represents, normalized by the signal RMS.
ResampleError resample_error(const ToneBankSignal& sig, const SampleStream& out);

}  // namespace scfo
