#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "scfo/frontend.hpp"
#include "scfo/rational.hpp"
#include "scfo/signal.hpp"

namespace scfo {

struct CorrelationReport {
  std::complex<double> rho;
  double T = 0.0;
  std::int64_t n_samples = 0;
  double suppression_db = 0.0;  // -10 log10 |rho|, rho being a power ratio
  std::vector<std::pair<double, double>> per_freq_loss;
};

/// Running sums for rho = <a conj(b)> / sqrt(<|a|^2> <|b|^2>).
///
/// Samples are folded into the totals in fixed 4096-sample chunks counted
/// from the first sample, so the result does not depend on how the input was
/// split across add() calls.
class CorrelationAccumulator {
 public:
  static constexpr std::int64_t kChunk = 4096;

  void add(std::complex<double> a, std::complex<double> b) {
    pab_ += a * std::conj(b);
    paa_ += std::norm(a);
    pbb_ += std::norm(b);
    if (++in_chunk_ == kChunk) fold();
  }
  template <typename DerivedA, typename DerivedB>
  void add(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    for (Eigen::Index k = 0; k < a.size(); ++k) add(std::complex<double>(a[k]), std::complex<double>(b[k]));
  }

  std::int64_t count() const { return n_ + in_chunk_; }
  std::complex<double> rho() const;
  std::complex<double> cross() const { return sab_ + pab_; }
  double power_a() const { return saa_ + paa_; }
  double power_b() const { return sbb_ + pbb_; }

 private:
  void fold() {
    sab_ += pab_;
    saa_ += paa_;
    sbb_ += pbb_;
    pab_ = 0.0;
    paa_ = pbb_ = 0.0;
    n_ += in_chunk_;
    in_chunk_ = 0;
  }

  std::complex<double> sab_{0.0}, pab_{0.0};
  double saa_ = 0.0, sbb_ = 0.0, paa_ = 0.0, pbb_ = 0.0;
  std::int64_t n_ = 0;
  std::int64_t in_chunk_ = 0;
};

/// Correlates over exactly floor(T * f_c) samples of the time overlap, after
/// skipping `skip` samples of it. Streams must share a rate and sit on the
/// same sample grid.
CorrelationReport correlate(const ComplexSampleStream& a, const ComplexSampleStream& b, double T, std::int64_t skip = 0);

/// Envelope suppression 10 log10(2 pi delta_f T), valid for delta_f T > 1/pi.
double washing_suppression_db(double delta_f_hz, double T_s);

/// Envelope |rho| bound 1 / (2 pi delta_f T).
double washing_envelope(double delta_f_hz, double T_s);

/// 1 - sin(phi) / phi.
double coherence_loss(double phi_pp);

/// One antenna-pair signal path for the sensitivity experiment.
struct ChainSpec {
  std::string name = "chain";
  QuantizerSpec adc{QuantKind::Float};
  bool resample = false;
  Rational rate_offset{1, 1000};  // antennas run at f_c (1 +/- offset) when resampling
  int taps = 56;
  int phases = 1024;
  int coeff_bits = 18;
  QuantizerSpec requant{QuantKind::Float};
};

struct SensitivityConfig {
  RationalFreq f_c{Rational(1000000)};
  double band_lo = 0.0833;  // fractions of Nyquist for the sky tones
  double band_hi = 0.9167;
  int n_tones = 32;
  double snr_db = 0.0;  // sky power over per-antenna noise power
  std::int64_t chunk = 1 << 16;
  int batches = 64;
  Eigen::Index block = 1024;
  std::int64_t per_freq_samples = std::int64_t{1} << 22;
  double max_stderr = -1.0;  // fail with InsufficientSamples above this; negative disables
  int jobs = 2;
};

struct ChainLoss {
  double loss = 0.0;     // 1 - rho_chain / rho_float over the whole run
  double std_error = 0.0;  // batch-means standard error
  double rho_chain = 0.0;
  double rho_float = 0.0;
  std::vector<double> batch_loss;
};

struct SensitivityReport {
  ChainLoss a, b;
  double diff = 0.0;  // b.loss - a.loss
  double diff_stderr = 0.0;
  std::int64_t n = 0;
  std::vector<double> freq_hz;  // per-frequency bins inside the sky band
  std::vector<double> loss_a, loss_b;
};

/// Runs both chains on the same sky realization with independent noise per
/// antenna and compares each chain against its own unquantized twin (same
/// clocks, same noise, same filter).
SensitivityReport sensitivity_loss(std::uint64_t sig_seed, const ChainSpec& chain_a, const ChainSpec& chain_b,
                                   std::int64_t n, const SensitivityConfig& cfg = {});

}  // namespace scfo
