#include "scfo/correlator.hpp"

#include <cmath>
#include <deque>
#include <memory>
#include <numbers>
#include <thread>

#include "scfo/random.hpp"
#include "scfo/resampler.hpp"
#include "scfo/spectrum.hpp"

namespace scfo {

std::complex<double> CorrelationAccumulator::rho() const {
  const double d = std::sqrt(power_a() * power_b());
  return d > 0.0 ? cross() / d : std::complex<double>(0.0);
}

CorrelationReport correlate(const ComplexSampleStream& a, const ComplexSampleStream& b, double T, std::int64_t skip) {
  if (!(a.rate == b.rate)) throw Error(ErrorCode::RateMismatch, "streams have different rates");
  const Rational lag = (b.epoch - a.epoch) * a.rate.hz();
  if (!lag.is_integer()) throw Error(ErrorCode::InvalidArgument, "streams are not on a common sample grid");
  const auto shift = static_cast<std::int64_t>(lag.num());  // b[0] sits at a[shift]
  const std::int64_t a0 = std::max<std::int64_t>(0, shift);
  const std::int64_t b0 = std::max<std::int64_t>(0, -shift);
  const std::int64_t overlap = std::min(a.size() - a0, b.size() - b0);
  // T is decimal seconds; absorb its binary representation error before flooring.
  const long double want = static_cast<long double>(T) * a.rate.hz().to_long_double();
  const auto n = static_cast<std::int64_t>(std::floor(want + 1e-9L * std::max(1.0L, want)));
  if (n < 1 || skip < 0 || overlap - skip < n)
    throw Error(ErrorCode::InsufficientOverlap, "need " + std::to_string(n) + " overlapping samples after skipping " +
                                                    std::to_string(skip) + ", have " + std::to_string(overlap));
  CorrelationAccumulator acc;
  acc.add(a.data.segment(a0 + skip, n), b.data.segment(b0 + skip, n));
  CorrelationReport r;
  r.rho = acc.rho();
  r.T = T;
  r.n_samples = n;
  r.suppression_db = -10.0 * std::log10(std::max(std::abs(r.rho), 1e-300));
  return r;
}

double washing_suppression_db(double delta_f_hz, double T_s) {
  const double x = std::abs(delta_f_hz) * T_s;
  if (!(x > 1.0 / std::numbers::pi))
    throw Error(ErrorCode::EnvelopeRegimeViolated, "delta_f * T must exceed 1/pi for the envelope to apply");
  return 10.0 * std::log10(2.0 * std::numbers::pi * x);
}

double washing_envelope(double delta_f_hz, double T_s) {
  return 1.0 / (2.0 * std::numbers::pi * std::abs(delta_f_hz) * T_s);
}

double coherence_loss(double phi) {
  if (phi < 0.0) throw Error(ErrorCode::InvalidArgument, "phi_pp must be >= 0");
  if (phi < 1e-3) {
    const double p2 = phi * phi;
    return p2 / 6.0 - p2 * p2 / 120.0 + p2 * p2 * p2 / 5040.0;
  }
  return 1.0 - std::sin(phi) / phi;
}

// ---------------------------------------------------------------------------

namespace {

struct Sums {
  long double xy = 0, xx = 0, yy = 0;
  void add(double x, double y) {
    xy += static_cast<long double>(x) * y;
    xx += static_cast<long double>(x) * x;
    yy += static_cast<long double>(y) * y;
  }
  double rho() const { return static_cast<double>(xy / std::sqrt(xx * yy)); }
  Sums& operator+=(const Sums& o) {
    xy += o.xy;
    xx += o.xx;
    yy += o.yy;
    return *this;
  }
};

// One antenna: analytic sky plus its own noise, digitized and (optionally)
// resampled along a float path and a quantized path.
struct Antenna {
  RationalFreq rate;
  Rng noise_rng;
  double noise_rms;
  std::int64_t produced = 0;
  Quantizer adc;
  std::unique_ptr<StreamingResampler<double>> rs_float, rs_quant;
  std::deque<double> out_float, out_quant;
  std::int64_t first_tick = 0;

  Antenna(const RationalFreq& r, std::uint64_t seed, double nrms, const Quantizer& q)
      : rate(r), noise_rng(seed), noise_rms(nrms), adc(q) {}
};

class ChainRun {
 public:
  ChainRun(const ToneBankSignal& sky, const ChainSpec& spec, const SensitivityConfig& cfg, std::uint64_t seed,
           std::int64_t n)
      : sky_(sky), spec_(spec), cfg_(cfg), n_(n), welch_f_(cfg.block), welch_q_(cfg.block) {
    const double noise_rms = std::pow(10.0, -cfg.snr_db / 20.0);
    const double sigma = std::sqrt(sky.rms() * sky.rms() + noise_rms * noise_rms);
    const Quantizer adc(spec.adc.kind, spec.adc.kind == QuantKind::Float ? 1.0 : (spec.adc.sigma > 0 ? spec.adc.sigma : sigma) * spec.adc.loading);
    const Rational offs = spec.resample ? spec.rate_offset : Rational{0};
    const Rational rates[2] = {cfg.f_c.hz() * (Rational(1) + offs), cfg.f_c.hz() * (Rational(1) - offs)};
    if (spec.resample) bank_ = design_bank(spec.taps, spec.phases, spec.coeff_bits);
    ant_.reserve(2);
    for (int i = 0; i < 2; ++i) {
      ant_.emplace_back(RationalFreq(rates[i]), derive_seed(seed, 1000 + static_cast<std::uint64_t>(i)), noise_rms, adc);
      Antenna& a = ant_.back();
      if (spec.resample) {
        a.rs_float = std::make_unique<StreamingResampler<double>>(bank_, a.rate, Rational{0}, cfg.f_c);
        a.rs_quant = std::make_unique<StreamingResampler<double>>(bank_, a.rate, Rational{0}, cfg.f_c);
        a.first_tick = a.rs_float->grid().first_tick;
      }
    }
    batch_len_ = std::max<std::int64_t>(1, n / cfg.batches);
  }

  void run() {
    std::vector<double> x, xq, yf, yq;
    while (done_ < n_) {
      for (Antenna& a : ant_) produce(a, x, xq, yf, yq);
      consume();
    }
  }

  ChainLoss result() const {
    ChainLoss r;
    Sums tf, tq;
    for (std::size_t i = 0; i < batch_f_.size(); ++i) {
      tf += batch_f_[i];
      tq += batch_q_[i];
      r.batch_loss.push_back(1.0 - batch_q_[i].rho() / batch_f_[i].rho());
    }
    r.rho_float = tf.rho();
    r.rho_chain = tq.rho();
    r.loss = 1.0 - r.rho_chain / r.rho_float;
    r.std_error = batch_stderr(r.batch_loss);
    return r;
  }

  const CrossSpectrum& spectrum_float() const { return welch_f_.result(); }
  const CrossSpectrum& spectrum_quant() const { return welch_q_.result(); }

  static double batch_stderr(const std::vector<double>& v) {
    if (v.size() < 2) return INFINITY;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }

 private:
  void produce(Antenna& a, std::vector<double>& x, std::vector<double>& xq, std::vector<double>& yf,
               std::vector<double>& yq) {
    const auto len = static_cast<std::size_t>(cfg_.chunk);
    x.resize(len);
    xq.resize(len);
    Eigen::Map<Eigen::VectorXd> xm(x.data(), static_cast<Eigen::Index>(len));
    sky_.render(xm, Rational(a.produced) * a.rate.period(), a.rate.period());
    for (std::size_t k = 0; k < len; ++k) {
      x[k] += a.noise_rms * a.noise_rng.gaussian();
      xq[k] = a.adc(x[k]);
    }
    a.produced += static_cast<std::int64_t>(len);
    if (!spec_.resample) {
      a.out_float.insert(a.out_float.end(), x.begin(), x.end());
      for (double v : xq) a.out_quant.push_back(requant(v));
      return;
    }
    yf.clear();
    yq.clear();
    a.rs_float->push(std::span<const double>(x), yf);
    a.rs_quant->push(std::span<const double>(xq), yq);
    a.out_float.insert(a.out_float.end(), yf.begin(), yf.end());
    for (double v : yq) a.out_quant.push_back(requant(v));
  }

  double requant(double v) {
    if (spec_.requant.kind == QuantKind::Float) return v;
    if (!requant_q_) {
      // Scale from the analytic input power; the resampler keeps it.
      const double noise_rms = std::pow(10.0, -cfg_.snr_db / 20.0);
      double sigma = spec_.requant.sigma;
      if (sigma <= 0.0) sigma = std::sqrt(sky_.rms() * sky_.rms() + noise_rms * noise_rms);
      requant_q_ = std::make_unique<Quantizer>(spec_.requant.kind, sigma * spec_.requant.loading);
    }
    return (*requant_q_)(v);
  }

  void consume() {
    Antenna& X = ant_[0];
    Antenna& Y = ant_[1];
    // Align both antennas on the common output tick.
    while (X.first_tick < Y.first_tick && !X.out_float.empty()) {
      X.out_float.pop_front();
      X.out_quant.pop_front();
      ++X.first_tick;
    }
    while (Y.first_tick < X.first_tick && !Y.out_float.empty()) {
      Y.out_float.pop_front();
      Y.out_quant.pop_front();
      ++Y.first_tick;
    }
    if (X.first_tick != Y.first_tick) return;
    const std::size_t avail = std::min(X.out_float.size(), Y.out_float.size());
    std::size_t take = static_cast<std::size_t>(std::min<std::int64_t>(static_cast<std::int64_t>(avail), n_ - done_));
    for (std::size_t i = 0; i < take; ++i) {
      const double xf = X.out_float[i], yf = Y.out_float[i];
      const double xq = X.out_quant[i], yq = Y.out_quant[i];
      const auto batch = static_cast<std::size_t>(std::min<std::int64_t>(done_ / batch_len_, cfg_.batches - 1));
      if (batch >= batch_f_.size()) {
        batch_f_.resize(batch + 1);
        batch_q_.resize(batch + 1);
      }
      batch_f_[batch].add(xf, yf);
      batch_q_[batch].add(xq, yq);
      if (done_ < cfg_.per_freq_samples) {
        welch_f_.push(xf, yf);
        welch_q_.push(xq, yq);
      }
      ++done_;
    }
    X.out_float.erase(X.out_float.begin(), X.out_float.begin() + static_cast<std::ptrdiff_t>(take));
    X.out_quant.erase(X.out_quant.begin(), X.out_quant.begin() + static_cast<std::ptrdiff_t>(take));
    Y.out_float.erase(Y.out_float.begin(), Y.out_float.begin() + static_cast<std::ptrdiff_t>(take));
    Y.out_quant.erase(Y.out_quant.begin(), Y.out_quant.begin() + static_cast<std::ptrdiff_t>(take));
    X.first_tick += static_cast<std::int64_t>(take);
    Y.first_tick += static_cast<std::int64_t>(take);
  }

  const ToneBankSignal& sky_;
  ChainSpec spec_;
  SensitivityConfig cfg_;
  std::int64_t n_;
  std::int64_t done_ = 0;
  std::int64_t batch_len_ = 1;
  CoefficientBank bank_;
  std::vector<Antenna> ant_;
  std::unique_ptr<Quantizer> requant_q_;
  std::vector<Sums> batch_f_, batch_q_;
  WelchAccumulator welch_f_, welch_q_;
};

std::vector<double> per_freq_loss(const ChainRun& run, const std::vector<Eigen::Index>& bins) {
  const Eigen::VectorXcd cf = run.spectrum_float().coherence();
  const Eigen::VectorXcd cq = run.spectrum_quant().coherence();
  std::vector<double> out;
  for (Eigen::Index k : bins) out.push_back(1.0 - std::abs(cq[k]) / std::abs(cf[k]));
  return out;
}

}  // namespace

SensitivityReport sensitivity_loss(std::uint64_t sig_seed, const ChainSpec& chain_a, const ChainSpec& chain_b,
                                   std::int64_t n, const SensitivityConfig& cfg) {
  if (n < cfg.batches * 2) throw Error(ErrorCode::InsufficientSamples, "too few samples for batch statistics");
  const double nyq = 0.5 * cfg.f_c.to_double();
  const ToneBankSignal sky = synth_signal(sig_seed, cfg.n_tones, Band{cfg.band_lo * nyq, cfg.band_hi * nyq});

  ChainRun ra(sky, chain_a, cfg, derive_seed(sig_seed, 1), n);
  ChainRun rb(sky, chain_b, cfg, derive_seed(sig_seed, 2), n);
  if (cfg.jobs >= 2) {
    std::thread t([&] { ra.run(); });
    rb.run();
    t.join();
  } else {
    ra.run();
    rb.run();
  }

  SensitivityReport rep;
  rep.n = n;
  rep.a = ra.result();
  rep.b = rb.result();
  rep.diff = rep.b.loss - rep.a.loss;
  std::vector<double> d;
  for (std::size_t i = 0; i < rep.a.batch_loss.size() && i < rep.b.batch_loss.size(); ++i)
    d.push_back(rep.b.batch_loss[i] - rep.a.batch_loss[i]);
  rep.diff_stderr = ChainRun::batch_stderr(d);

  std::vector<Eigen::Index> bins;
  const double fs = cfg.f_c.to_double();
  for (Eigen::Index k = 0; k <= cfg.block / 2; ++k) {
    const double f = fs * static_cast<double>(k) / static_cast<double>(cfg.block);
    if (f >= cfg.band_lo * nyq && f <= cfg.band_hi * nyq) {
      bins.push_back(k);
      rep.freq_hz.push_back(f);
    }
  }
  if (ra.spectrum_float().n_blocks > 0) {
    rep.loss_a = per_freq_loss(ra, bins);
    rep.loss_b = per_freq_loss(rb, bins);
  }
  if (cfg.max_stderr > 0.0 && (rep.a.std_error > cfg.max_stderr || rep.b.std_error > cfg.max_stderr ||
                               rep.diff_stderr > cfg.max_stderr))
    throw Error(ErrorCode::InsufficientSamples, "Monte Carlo standard error exceeds the requested tolerance");
  return rep;
}

}  // namespace scfo
