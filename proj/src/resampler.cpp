#include "scfo/resampler.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

namespace scfo {

namespace {

double sinc_pi(double x) {
  if (x == 0.0) return 1.0;
  if (x == std::round(x)) return 0.0;  // sin(pi k) is not exactly 0 in floating point
  const double a = std::numbers::pi * x;
  return std::sin(a) / a;
}

double kaiser(double x, double half_width, double beta) {
  const double r = x / half_width;
  if (std::abs(r) >= 1.0) return 1.0 / std::cyl_bessel_i(0.0, beta);
  return std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - r * r)) / std::cyl_bessel_i(0.0, beta);
}

// Unit-DC-gain prototype taps for delay c + d.
void prototype_phase(double* h, int n, double d, WindowKind kind, double beta) {
  const double c = 0.5 * (n - 1);
  double sum = 0.0;
  for (int m = 0; m < n; ++m) {
    const double x = m - c - d;
    const double w = kind == WindowKind::Kaiser ? kaiser(x, 0.5 * n, beta) : 1.0;
    h[m] = w * sinc_pi(x);
    sum += h[m];
  }
  for (int m = 0; m < n; ++m) h[m] /= sum;
}

std::complex<double> freq_response(const double* h, int n, double omega) {
  std::complex<double> acc = 0.0;
  for (int m = 0; m < n; ++m) acc += h[m] * std::polar(1.0, -omega * m);
  return acc;
}

// Delay error in samples of taps h versus the target delay, at normalized
// frequency f (fraction of Nyquist).
double delay_error(const double* h, int n, double target, double f) {
  if (f == 0.0) {
    double s = 0.0, sm = 0.0;
    for (int m = 0; m < n; ++m) {
      s += h[m];
      sm += m * h[m];
    }
    return sm / s - target;
  }
  const double omega = std::numbers::pi * f;
  const std::complex<double> hv = freq_response(h, n, omega);
  // Residual phase after removing the target linear phase, wrapped.
  const std::complex<double> resid = hv * std::polar(1.0, omega * target);
  return -std::arg(resid) / omega;
}

double scan_delay_pkpk(int n, int phases, double lo, double hi, WindowKind kind, double beta) {
  std::vector<double> h(static_cast<std::size_t>(n));
  const int stride = std::max(1, phases / 16);
  double dmin = INFINITY, dmax = -INFINITY;
  constexpr int kFreq = 32;
  for (int i = 0; i < phases; i += stride) {
    const double d = (i - phases / 2) / static_cast<double>(phases);
    prototype_phase(h.data(), n, d, kind, beta);
    for (int k = 0; k < kFreq; ++k) {
      const double f = lo + (hi - lo) * k / (kFreq - 1);
      const double e = delay_error(h.data(), n, 0.5 * (n - 1) + d, f);
      dmin = std::min(dmin, e);
      dmax = std::max(dmax, e);
    }
  }
  return dmax - dmin;
}

// Rounds one phase to integers whose sum is exactly `scale`, moving the taps
// with the largest rounding residuals first. A tap of exactly 1.0 (the
// integer-delay phase) saturates one LSB short of full scale.
void quantize_phase(const double* h, std::int32_t* q, int n, std::int64_t scale, int bits) {
  const std::int64_t hi = (std::int64_t{1} << (bits - 1)) - 1, lo = -(std::int64_t{1} << (bits - 1));
  std::vector<double> resid(static_cast<std::size_t>(n));
  std::int64_t sum = 0;
  for (int m = 0; m < n; ++m) {
    const double v = h[m] * static_cast<double>(scale);
    const double r = std::nearbyint(v);
    if (r > static_cast<double>(hi) + 1.0 || r < static_cast<double>(lo))
      throw Error(ErrorCode::DesignInfeasible, "tap does not fit in " + std::to_string(bits) + " bits");
    q[m] = static_cast<std::int32_t>(std::clamp<double>(r, static_cast<double>(lo), static_cast<double>(hi)));
    resid[static_cast<std::size_t>(m)] = v - q[m];
    sum += q[m];
  }
  std::int64_t diff = scale - sum;
  if (diff == 0) return;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const int dir = diff > 0 ? 1 : -1;
  // Ties go to the tap nearest the centre.
  const double c = 0.5 * (n - 1);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ra = dir * resid[static_cast<std::size_t>(a)], rb = dir * resid[static_cast<std::size_t>(b)];
    if (ra != rb) return ra > rb;
    return std::abs(a - c) < std::abs(b - c);
  });
  for (std::size_t j = 0, stuck = 0; diff != 0; j = (j + 1) % order.size()) {
    const int m = order[j];
    if ((dir > 0 && q[m] >= hi) || (dir < 0 && q[m] <= lo)) {
      if (++stuck > order.size()) throw Error(ErrorCode::DesignInfeasible, "tap sum does not fit in " + std::to_string(bits) + " bits");
      continue;
    }
    stuck = 0;
    q[m] += dir;
    diff -= dir;
  }
}

}  // namespace

CoefficientBank design_bank(int taps, int phases, int coeff_bits, double pass_lo, double pass_hi, WindowSpec window) {
  if (taps < 1) throw Error(ErrorCode::InvalidArgument, "tap count must be >= 1");
  if (phases < 2 || (phases & (phases - 1)) != 0) throw Error(ErrorCode::InvalidArgument, "phase count must be a power of two >= 2");
  if (coeff_bits < 0 || coeff_bits == 1 || coeff_bits > 31) throw Error(ErrorCode::InvalidArgument, "coeff_bits must be 0 or in [2, 31]");
  if (!(pass_lo >= 0.0 && pass_lo < pass_hi && pass_hi < 1.0))
    throw Error(ErrorCode::InvalidArgument, "passband must lie within (0, 1)");

  CoefficientBank bank;
  bank.taps = taps;
  bank.phases = phases;
  bank.coeff_bits = coeff_bits;
  bank.window = window.kind;
  bank.pass_lo = pass_lo;
  bank.pass_hi = pass_hi;

  double beta = window.beta;
  if (window.kind == WindowKind::Kaiser && std::isnan(beta)) {
    double best = INFINITY;
    for (int k = 0; k <= 100; ++k) {
      const double b = 2.0 + 0.1 * k;
      const double v = scan_delay_pkpk(taps, phases, pass_lo, pass_hi, window.kind, b);
      if (v < best) {
        best = v;
        beta = b;
      }
    }
  }
  bank.beta = window.kind == WindowKind::Kaiser ? beta : 0.0;

  bank.prototype.resize(phases, taps);
  for (int i = 0; i < phases; ++i)
    prototype_phase(bank.prototype.data() + static_cast<Eigen::Index>(i) * taps, taps,
                    (i - phases / 2) / static_cast<double>(phases), window.kind, bank.beta);

  if (coeff_bits > 0) {
    const std::int64_t scale = std::int64_t{1} << (coeff_bits - 1);
    bank.fixed.resize(phases, taps);
    for (int i = 0; i < phases; ++i)
      quantize_phase(bank.prototype.data() + static_cast<Eigen::Index>(i) * taps,
                     bank.fixed.data() + static_cast<Eigen::Index>(i) * taps, taps, scale, coeff_bits);
    bank.table = bank.fixed.cast<double>() / static_cast<double>(scale);
  } else {
    bank.table = bank.prototype;
  }

  if (std::isfinite(window.ripple_bound_db)) {
    const BankFigures fig = analyze_bank(bank, pass_lo, pass_hi, 64, std::max(1, phases / 64));
    if (!(fig.ripple_db < window.ripple_bound_db))
      throw Error(ErrorCode::DesignInfeasible, "passband ripple " + std::to_string(fig.ripple_db) + " dB exceeds bound " +
                                                   std::to_string(window.ripple_bound_db) + " dB");
  }
  return bank;
}

const CoefficientBank& default_bank() {
  static const CoefficientBank bank = design_bank(56, 1024, 19);
  return bank;
}

FrequencyResponse response(const CoefficientBank& bank, int phase, int n_freq) {
  if (phase < 0 || phase >= bank.phases) throw Error(ErrorCode::InvalidArgument, "phase out of range");
  if (n_freq < 2) throw Error(ErrorCode::InvalidArgument, "n_freq must be >= 2");
  FrequencyResponse r;
  const double* h = bank.row(phase);
  const double target = bank.center() + (phase - bank.phases / 2) / static_cast<double>(bank.phases);
  for (int k = 0; k < n_freq; ++k) {
    const double f = static_cast<double>(k) / (n_freq - 1);
    r.freq.push_back(f);
    r.mag_db.push_back(20.0 * std::log10(std::abs(freq_response(h, bank.taps, std::numbers::pi * f))));
    r.delay_err.push_back(delay_error(h, bank.taps, target, f));
  }
  return r;
}

BankFigures analyze_bank(const CoefficientBank& bank, double lo, double hi, int n_freq, int phase_stride) {
  double mmin = INFINITY, mmax = -INFINITY, dmin = INFINITY, dmax = -INFINITY;
  BankFigures fig;
  std::vector<std::complex<double>> rot(static_cast<std::size_t>(bank.taps));
  for (int k = 0; k < n_freq; ++k) {
    const double f = n_freq == 1 ? lo : lo + (hi - lo) * k / (n_freq - 1);
    const double omega = std::numbers::pi * f;
    for (int m = 0; m < bank.taps; ++m) rot[static_cast<std::size_t>(m)] = std::polar(1.0, -omega * m);
    for (int i = 0; i < bank.phases; i += phase_stride) {
      const double* h = bank.row(i);
      std::complex<double> hv = 0.0;
      for (int m = 0; m < bank.taps; ++m) hv += h[m] * rot[static_cast<std::size_t>(m)];
      const double mag = 20.0 * std::log10(std::abs(hv));
      const double target = bank.center() + (i - bank.phases / 2) / static_cast<double>(bank.phases);
      const double de = f == 0.0 ? delay_error(h, bank.taps, target, 0.0)
                                 : -std::arg(hv * std::polar(1.0, omega * target)) / omega;
      mmin = std::min(mmin, mag);
      mmax = std::max(mmax, mag);
      dmin = std::min(dmin, de);
      dmax = std::max(dmax, de);
      fig.max_abs_mag_db = std::max(fig.max_abs_mag_db, std::abs(mag));
      fig.max_abs_delay = std::max(fig.max_abs_delay, std::abs(de));
    }
  }
  fig.ripple_db = mmax - mmin;
  fig.delay_pkpk = dmax - dmin;
  return fig;
}

void write_bank(std::ostream& os, const CoefficientBank& bank) {
  char buf[64];
  os << "# scfo coefficient bank: one phase per line, phase i delays by c + (i - P/2)/P\n";
  os << "# taps " << bank.taps << "\n# phases " << bank.phases << "\n# bits " << bank.coeff_bits << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", bank.beta);
  os << "# window " << (bank.window == WindowKind::Kaiser ? "kaiser" : "rectangular") << "\n# beta " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.17g %.17g", bank.pass_lo, bank.pass_hi);
  os << "# passband " << buf << "\n";
  for (int i = 0; i < bank.phases; ++i) {
    for (int m = 0; m < bank.taps; ++m) {
      if (m) os << ' ';
      if (bank.quantized()) {
        os << bank.fixed(i, m);
      } else {
        std::snprintf(buf, sizeof buf, "%.17g", bank.table(i, m));
        os << buf;
      }
    }
    os << '\n';
  }
}

CoefficientBank read_bank(std::istream& is) {
  CoefficientBank bank;
  bank.taps = bank.phases = -1;
  std::string line;
  std::vector<std::vector<double>> rows;
  std::string window = "kaiser";
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key;
      ls >> hash >> key;
      if (key == "taps") ls >> bank.taps;
      else if (key == "phases") ls >> bank.phases;
      else if (key == "bits") ls >> bank.coeff_bits;
      else if (key == "beta") ls >> bank.beta;
      else if (key == "window") ls >> window;
      else if (key == "passband") ls >> bank.pass_lo >> bank.pass_hi;
      continue;
    }
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) throw Error(ErrorCode::FormatError, "bad coefficient in bank file");
    rows.push_back(std::move(row));
  }
  if (bank.taps < 1 || bank.phases < 2) throw Error(ErrorCode::FormatError, "bank file lacks taps/phases header");
  if (rows.size() != static_cast<std::size_t>(bank.phases)) throw Error(ErrorCode::FormatError, "bank file has wrong phase count");
  bank.window = window == "rectangular" ? WindowKind::Rectangular : WindowKind::Kaiser;
  bank.table.resize(bank.phases, bank.taps);
  if (bank.quantized()) bank.fixed.resize(bank.phases, bank.taps);
  const double scale = bank.quantized() ? std::ldexp(1.0, bank.coeff_bits - 1) : 1.0;
  for (int i = 0; i < bank.phases; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (row.size() != static_cast<std::size_t>(bank.taps)) throw Error(ErrorCode::FormatError, "bank row has wrong tap count");
    for (int m = 0; m < bank.taps; ++m) {
      if (bank.quantized()) {
        bank.fixed(i, m) = static_cast<std::int32_t>(row[static_cast<std::size_t>(m)]);
        bank.table(i, m) = bank.fixed(i, m) / scale;
      } else {
        bank.table(i, m) = row[static_cast<std::size_t>(m)];
      }
    }
  }
  bank.prototype = bank.table;
  return bank;
}

void write_response_csv(std::ostream& os, const FrequencyResponse& r) {
  char buf[96];
  os << "freq,mag_db,delay_err\n";
  for (std::size_t k = 0; k < r.freq.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", r.freq[k], r.mag_db[k], r.delay_err[k]);
    os << buf;
  }
}

ResampleGrid resample_grid(const CoefficientBank& bank, const RationalFreq& f_a, const Rational& in_epoch,
                           const RationalFreq& f_c) {
  if (f_a.num() == 0 || f_c.num() == 0) throw Error(ErrorCode::InvalidArgument, "sample rates must be positive");
  ResampleGrid g;
  g.ratio = f_a.hz() / f_c.hz();
  const Rational c(int128{bank.taps - 1}, 2);
  const std::int64_t s0 = bank.window_offset();
  const Rational shift = c + Rational(s0);
  int128 j = (in_epoch * f_c.hz()).ceil();
  for (;;) {
    const Rational x = (Rational(j) / f_c.hz() - in_epoch) * f_a.hz() - shift;
    if (PhaseAccumulator::quantize(x, bank.phases).first + s0 >= 0) {
      g.start = x;
      break;
    }
    ++j;
  }
  g.first_tick = static_cast<std::int64_t>(j);
  return g;
}

int impulse_width(const CoefficientBank& bank, double rel) {
  int widest = 0;
  for (int i = 0; i < bank.phases; ++i) {
    const double* h = bank.row(i);
    double peak = 0.0;
    for (int m = 0; m < bank.taps; ++m) peak = std::max(peak, std::abs(h[m]));
    int first = -1, last = -1;
    for (int m = 0; m < bank.taps; ++m)
      if (std::abs(h[m]) >= rel * peak) {
        if (first < 0) first = m;
        last = m;
      }
    widest = std::max(widest, last - first + 1);
  }
  return widest;
}

double impacted_fraction(const ResampleStats& stats, int width) {
  if (stats.outputs <= 0) return 0.0;
  std::vector<std::int64_t> ev(stats.skip_events);
  ev.insert(ev.end(), stats.repeat_events.begin(), stats.repeat_events.end());
  std::sort(ev.begin(), ev.end());
  // Window [e - width/2, e - width/2 + width) clipped to the output range.
  std::int64_t covered = 0, reach = std::numeric_limits<std::int64_t>::min();
  for (std::int64_t e : ev) {
    const std::int64_t lo = std::max<std::int64_t>(std::max(e - width / 2, reach), 0);
    const std::int64_t hi = std::min(e - width / 2 + width, stats.outputs);
    if (hi > lo) covered += hi - lo;
    reach = std::max(reach, hi);
  }
  return static_cast<double>(covered) / static_cast<double>(stats.outputs);
}

void propagate_pps(const SampleStream& in, SampleStream& out) {
  out.pps_marks.clear();
  const Rational first = out.epoch * out.rate.hz();
  for (std::int64_t j : in.pps_marks) {
    const int128 m = (in.time_of(j) * out.rate.hz() - first).round_half_even();
    if (m < 0 || m >= out.size()) continue;
    const auto mi = static_cast<std::int64_t>(m);
    if (out.pps_marks.empty() || out.pps_marks.back() < mi) out.pps_marks.push_back(mi);
  }
}

ResampleResult resample_detailed(const SampleStream& in, const RationalFreq& f_c, const CoefficientBank& bank,
                                 const ResampleOptions& opts) {
  if (in.size() < bank.taps) throw Error(ErrorCode::StreamTooShort, "stream shorter than the filter");
  StreamingResampler<double> rs(bank, in.rate, in.epoch, f_c, opts.record_events);
  std::vector<double> y;
  y.reserve(static_cast<std::size_t>(static_cast<double>(in.size()) / rs.grid().ratio.to_double()) + 4);
  rs.push(std::span<const double>(in.data.data(), static_cast<std::size_t>(in.size())), y);
  if (y.empty()) throw Error(ErrorCode::StreamTooShort, "no complete filter window in stream");
  ResampleResult r;
  r.out.rate = f_c;
  r.out.epoch = rs.output_epoch();
  r.out.zone = in.zone;
  r.out.data = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  propagate_pps(in, r.out);
  if (opts.requant.kind != QuantKind::Float) r.out = quantize(r.out, opts.requant);
  r.stats = rs.stats();
  return r;
}

FixedResampleResult resample_fixed(const SampleStream& in, const RationalFreq& f_c, const CoefficientBank& bank,
                                   bool record_events) {
  if (in.size() < bank.taps) throw Error(ErrorCode::StreamTooShort, "stream shorter than the filter");
  const std::vector<std::int32_t> codes = fixed_codes(in);
  StreamingResampler<std::int32_t> rs(bank, in.rate, in.epoch, f_c, record_events);
  FixedResampleResult r;
  rs.push(std::span<const std::int32_t>(codes), r.acc);
  if (r.acc.empty()) throw Error(ErrorCode::StreamTooShort, "no complete filter window in stream");
  const double unit = 0.5 * (8.0 * in.quant_scale / 256.0) / std::ldexp(1.0, bank.coeff_bits - 1);
  r.out.rate = f_c;
  r.out.epoch = rs.output_epoch();
  r.out.zone = in.zone;
  r.out.data.resize(static_cast<Eigen::Index>(r.acc.size()));
  for (std::size_t k = 0; k < r.acc.size(); ++k) r.out.data[static_cast<Eigen::Index>(k)] = static_cast<double>(r.acc[k]) * unit;
  propagate_pps(in, r.out);
  r.stats = rs.stats();
  return r;
}

ResampleError resample_error(const ToneBankSignal& sig, const SampleStream& out) {
  if (out.quant != QuantKind::Float) throw Error(ErrorCode::ChainWasQuantized, "error analysis needs a float chain");
  ResampleError e;
  if (out.size() == 0) return e;
  Eigen::VectorXd ref(out.size());
  sig.render(ref, out.epoch, out.rate.period());
  const Eigen::VectorXd diff = out.data - ref;
  const double norm = sig.rms() > 0.0 ? sig.rms() : 1.0;
  e.rms_err = std::sqrt(diff.squaredNorm() / static_cast<double>(diff.size())) / norm;
  e.max_err = diff.cwiseAbs().maxCoeff() / norm;
  return e;
}

}  // namespace scfo
