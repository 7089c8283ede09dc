#include "scfo/frontend.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>

#include "scfo/random.hpp"

namespace scfo {

SampleStream sample(const ToneBankSignal& sig, const RationalFreq& f_a, std::int64_t n, Zone zone,
                    const Rational& epoch, const NoiseSpec& noise, double zone_slack) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
  if (f_a.num() == 0) throw Error(ErrorCode::InvalidArgument, "sample rate must be positive");
  if (zone == Zone::Zone2) {
    const double fs = f_a.to_double();
    const double lo = 0.5 * fs - zone_slack * fs;
    const double hi = fs + zone_slack * fs;
    const Band& b = sig.band();
    if (b.lo_hz < lo || b.hi_hz > hi)
      throw Error(ErrorCode::BandZoneMismatch, "band [" + std::to_string(b.lo_hz) + ", " + std::to_string(b.hi_hz) +
                                                   "] Hz is not inside Nyquist zone 2 of " + f_a.str() + " Hz");
  }
  SampleStream s;
  s.rate = f_a;
  s.epoch = epoch;
  s.zone = zone;
  s.data.resize(n);
  sig.render(s.data, epoch, f_a.period());
  if (noise.rms > 0.0) {
    Rng rng(noise.seed);
    for (Eigen::Index k = 0; k < n; ++k) s.data[k] += noise.rms * rng.gaussian();
  }
  return s;
}

namespace {

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

std::vector<double> compute_lloyd_max(int n) {
  // Start from a uniform grid over +/- 3 sigma and iterate centroid/midpoint
  // updates; for a Gaussian the centroid of [a, b] is (pdf(a) - pdf(b)) / P.
  std::vector<double> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = -3.0 + 6.0 * (i + 0.5) / n;
  std::vector<double> t(static_cast<std::size_t>(n + 1));
  for (int iter = 0; iter < 100000; ++iter) {
    t.front() = -INFINITY;
    t.back() = INFINITY;
    for (int i = 1; i < n; ++i) t[static_cast<std::size_t>(i)] = 0.5 * (y[static_cast<std::size_t>(i - 1)] + y[static_cast<std::size_t>(i)]);
    double change = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = t[static_cast<std::size_t>(i)], b = t[static_cast<std::size_t>(i + 1)];
      const double p = normal_cdf(b) - normal_cdf(a);
      const double pa = std::isinf(a) ? 0.0 : normal_pdf(a);
      const double pb = std::isinf(b) ? 0.0 : normal_pdf(b);
      const double c = (pa - pb) / p;
      change = std::max(change, std::abs(c - y[static_cast<std::size_t>(i)]));
      y[static_cast<std::size_t>(i)] = c;
    }
    if (change < 1e-12) break;
  }
  // Enforce exact odd symmetry.
  for (int i = 0; i < n / 2; ++i) {
    const double m = 0.5 * (y[static_cast<std::size_t>(n - 1 - i)] - y[static_cast<std::size_t>(i)]);
    y[static_cast<std::size_t>(i)] = -m;
    y[static_cast<std::size_t>(n - 1 - i)] = m;
  }
  return y;
}

}  // namespace

const std::vector<double>& lloyd_max_levels(int n_levels) {
  if (n_levels < 2) throw Error(ErrorCode::InvalidArgument, "Lloyd-Max needs at least 2 levels");
  static std::mutex mu;
  static std::map<int, std::vector<double>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n_levels);
  if (it == cache.end()) it = cache.emplace(n_levels, compute_lloyd_max(n_levels)).first;
  return it->second;
}

Quantizer::Quantizer(QuantKind kind, double scale) : kind_(kind), scale_(scale) {
  if (kind != QuantKind::Float && !(scale > 0.0))
    throw Error(ErrorCode::InvalidArgument, "quantizer scale must be positive");
  if (kind == QuantKind::Q4Optimal) {
    for (double l : lloyd_max_levels(16)) levels_.push_back(l * scale);
    for (std::size_t i = 1; i < levels_.size(); ++i) thresholds_.push_back(0.5 * (levels_[i - 1] + levels_[i]));
  } else if (kind == QuantKind::Q8Uniform) {
    step_ = 8.0 * scale / 256.0;
  }
}

int Quantizer::code(double x) const {
  switch (kind_) {
    case QuantKind::Q4Optimal: {
      auto it = std::upper_bound(thresholds_.begin(), thresholds_.end(), x);
      return static_cast<int>(it - thresholds_.begin()) - 8;
    }
    case QuantKind::Q8Uniform: {
      const double c = std::floor(x / step_);
      return static_cast<int>(std::clamp(c, -128.0, 127.0));
    }
    case QuantKind::Float: break;
  }
  throw Error(ErrorCode::InvalidArgument, "float quantizer has no codes");
}

double Quantizer::value_of_code(int c) const {
  switch (kind_) {
    case QuantKind::Q4Optimal: return levels_[static_cast<std::size_t>(c + 8)];
    case QuantKind::Q8Uniform: return (c + 0.5) * step_;
    case QuantKind::Float: break;
  }
  throw Error(ErrorCode::InvalidArgument, "float quantizer has no codes");
}

double Quantizer::operator()(double x) const {
  if (kind_ == QuantKind::Float) return x;
  return value_of_code(code(x));
}

SampleStream quantize(const SampleStream& s, const QuantizerSpec& q) {
  if (s.quant != QuantKind::Float) throw Error(ErrorCode::AlreadyQuantized, "stream is already quantized");
  if (!(q.loading > 0.0)) throw Error(ErrorCode::InvalidArgument, "quantizer loading must be > 0");
  SampleStream out = s;
  if (q.kind == QuantKind::Float) return out;
  double sigma = q.sigma;
  if (sigma <= 0.0) sigma = s.data.size() ? std::sqrt(s.data.squaredNorm() / static_cast<double>(s.data.size())) : 0.0;
  if (!(sigma > 0.0)) sigma = 1.0;
  const Quantizer quant(q.kind, sigma * q.loading);
  for (Eigen::Index k = 0; k < out.data.size(); ++k) out.data[k] = quant(out.data[k]);
  out.quant = q.kind;
  out.quant_scale = quant.scale();
  return out;
}

std::vector<std::int32_t> fixed_codes(const SampleStream& s) {
  if (s.quant != QuantKind::Q8Uniform) throw Error(ErrorCode::InvalidArgument, "fixed-point path needs Q8Uniform samples");
  const Quantizer q(QuantKind::Q8Uniform, s.quant_scale);
  std::vector<std::int32_t> out(static_cast<std::size_t>(s.data.size()));
  for (Eigen::Index k = 0; k < s.data.size(); ++k) out[static_cast<std::size_t>(k)] = 2 * q.code(s.data[k]) + 1;
  return out;
}

double FilterSpec::gain_db(double f) const {
  if (points.empty()) return 0.0;
  if (f < points.front().first) return points.front().second;
  if (f > points.back().first) return points.back().second;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const auto [x0, y0] = points[i];
    const auto [x1, y1] = points[i + 1];
    if (f > x1) continue;
    if (x1 == x0) return std::max(y0, y1);  // band edges belong to the passband side
    if (f == x0) return y0;
    if (f == x1) return y1;
    if (std::isinf(y0) || std::isinf(y1)) return std::min(y0, y1);
    return y0 + (y1 - y0) * (f - x0) / (x1 - x0);
  }
  return points.back().second;
}

double FilterSpec::gain(double f) const {
  const double db = gain_db(f);
  return std::isinf(db) && db < 0 ? 0.0 : std::pow(10.0, db / 20.0);
}

FilterSpec FilterSpec::brick_wall(double lo, double hi) {
  FilterSpec f;
  if (lo > 0.0) {
    f.points.emplace_back(lo, -INFINITY);
    f.points.emplace_back(lo, 0.0);
  }
  f.points.emplace_back(hi, 0.0);
  f.points.emplace_back(hi, -INFINITY);
  return f;
}

FilterSpec FilterSpec::relaxed(double lo, double hi, double atten_db, double factor) {
  FilterSpec f;
  if (lo > 0.0) {
    f.points.emplace_back(lo / factor, -atten_db);
    f.points.emplace_back(lo, 0.0);
  }
  f.points.emplace_back(hi, 0.0);
  f.points.emplace_back(hi * factor, -atten_db);
  return f;
}

ToneBankSignal antialias(const ToneBankSignal& sig, const FilterSpec& filt) {
  ToneBankSignal out = sig;
  for (Tone& t : out.tones()) t.amplitude *= filt.gain(t.freq_hz);
  return out;
}

// ---------------------------------------------------------------------------
// Binary layout helpers. Everything is written byte-by-byte in little-endian
// order so files are portable regardless of host endianness.

namespace {

constexpr char kMagic[4] = {'S', 'C', 'F', 'O'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
  static_assert(std::is_integral_v<T>);
  using U = std::make_unsigned_t<T>;
  U u = static_cast<U>(v);
  std::array<char, sizeof(T)> b;
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<char>((u >> (8 * i)) & 0xff);
  os.write(b.data(), b.size());
}

void put_f64(std::ostream& os, double v) { put(os, std::bit_cast<std::uint64_t>(v)); }
void put_f32(std::ostream& os, float v) { put(os, std::bit_cast<std::uint32_t>(v)); }

template <typename T>
T get(std::istream& is) {
  std::array<unsigned char, sizeof(T)> b;
  if (!is.read(reinterpret_cast<char*>(b.data()), b.size())) throw Error(ErrorCode::FormatError, "truncated stream file");
  using U = std::make_unsigned_t<T>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(static_cast<U>(b[i]) << (8 * i));
  return static_cast<T>(u);
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get<std::uint64_t>(is)); }
float get_f32(std::istream& is) { return std::bit_cast<float>(get<std::uint32_t>(is)); }

std::int64_t narrow(int128 v, const char* what) {
  if (v > INT64_MAX || v < INT64_MIN) throw Error(ErrorCode::Overflow, std::string(what) + " does not fit in 64 bits");
  return static_cast<std::int64_t>(v);
}

template <typename S>
void write_header(std::ostream& os, const S& s, bool complex) {
  os.write(kMagic, 4);
  put<std::uint16_t>(os, kVersion);
  put<std::uint8_t>(os, static_cast<std::uint8_t>(s.quant));
  put<std::uint8_t>(os, static_cast<std::uint8_t>(s.zone));
  put<std::uint8_t>(os, complex ? 1 : 0);
  put<std::uint8_t>(os, 0);
  put<std::uint16_t>(os, 0);
  put<std::int64_t>(os, narrow(s.rate.num(), "rate numerator"));
  put<std::int64_t>(os, narrow(s.rate.den(), "rate denominator"));
  put<std::int64_t>(os, narrow(s.epoch.num(), "epoch numerator"));
  put<std::int64_t>(os, narrow(s.epoch.den(), "epoch denominator"));
  put_f64(os, s.quant_scale);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(s.data.size()));
}

struct Header {
  QuantKind quant;
  Zone zone;
  bool complex;
  RationalFreq rate;
  Rational epoch;
  double scale;
  std::uint64_t count;
};

Header read_header(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw Error(ErrorCode::FormatError, "bad stream magic");
  if (get<std::uint16_t>(is) != kVersion) throw Error(ErrorCode::FormatError, "unsupported stream version");
  Header h{};
  const auto q = get<std::uint8_t>(is);
  const auto z = get<std::uint8_t>(is);
  const auto c = get<std::uint8_t>(is);
  get<std::uint8_t>(is);
  get<std::uint16_t>(is);
  if (q > 2 || z > 1 || c > 1) throw Error(ErrorCode::FormatError, "bad stream header codes");
  h.quant = static_cast<QuantKind>(q);
  h.zone = static_cast<Zone>(z);
  h.complex = c == 1;
  const auto rn = get<std::int64_t>(is);
  const auto rd = get<std::int64_t>(is);
  const auto en = get<std::int64_t>(is);
  const auto ed = get<std::int64_t>(is);
  h.rate = RationalFreq(Rational(int128{rn}, int128{rd}));
  h.epoch = Rational(int128{en}, int128{ed});
  h.scale = get_f64(is);
  h.count = get<std::uint64_t>(is);
  return h;
}

void write_marks(std::ostream& os, const std::vector<std::int64_t>& marks) {
  put<std::uint64_t>(os, marks.size());
  for (auto m : marks) put<std::int64_t>(os, m);
}

std::vector<std::int64_t> read_marks(std::istream& is, std::uint64_t count) {
  const auto n = get<std::uint64_t>(is);
  std::vector<std::int64_t> marks(n);
  for (auto& m : marks) {
    m = get<std::int64_t>(is);
    if (m < 0 || static_cast<std::uint64_t>(m) >= count) throw Error(ErrorCode::FormatError, "PPS mark out of range");
  }
  if (!std::is_sorted(marks.begin(), marks.end()) || std::adjacent_find(marks.begin(), marks.end()) != marks.end())
    throw Error(ErrorCode::FormatError, "PPS marks not strictly increasing");
  return marks;
}

void write_value(std::ostream& os, double v, const Quantizer* q) {
  if (q) put<std::int8_t>(os, static_cast<std::int8_t>(q->code(v)));
  else put_f32(os, static_cast<float>(v));
}

double read_value(std::istream& is, const Quantizer* q) {
  if (q) return q->value_of_code(get<std::int8_t>(is));
  return get_f32(is);
}

}  // namespace

void write_stream(std::ostream& os, const SampleStream& s) {
  write_header(os, s, false);
  std::optional<Quantizer> q;
  if (s.quant != QuantKind::Float) q.emplace(s.quant, s.quant_scale);
  for (Eigen::Index k = 0; k < s.data.size(); ++k) write_value(os, s.data[k], q ? &*q : nullptr);
  write_marks(os, s.pps_marks);
}

void write_stream(std::ostream& os, const ComplexSampleStream& s) {
  write_header(os, s, true);
  std::optional<Quantizer> q;
  if (s.quant != QuantKind::Float) q.emplace(s.quant, s.quant_scale);
  for (Eigen::Index k = 0; k < s.data.size(); ++k) {
    write_value(os, s.data[k].real(), q ? &*q : nullptr);
    write_value(os, s.data[k].imag(), q ? &*q : nullptr);
  }
  write_marks(os, s.pps_marks);
}

SampleStream read_stream(std::istream& is) {
  Header h = read_header(is);
  if (h.complex) throw Error(ErrorCode::FormatError, "stream is complex; use read_complex_stream");
  SampleStream s;
  s.rate = h.rate;
  s.epoch = h.epoch;
  s.quant = h.quant;
  s.zone = h.zone;
  s.quant_scale = h.scale;
  std::optional<Quantizer> q;
  if (s.quant != QuantKind::Float) q.emplace(s.quant, s.quant_scale);
  s.data.resize(static_cast<Eigen::Index>(h.count));
  for (Eigen::Index k = 0; k < s.data.size(); ++k) s.data[k] = read_value(is, q ? &*q : nullptr);
  s.pps_marks = read_marks(is, h.count);
  return s;
}

ComplexSampleStream read_complex_stream(std::istream& is) {
  Header h = read_header(is);
  if (!h.complex) throw Error(ErrorCode::FormatError, "stream is real; use read_stream");
  ComplexSampleStream s;
  s.rate = h.rate;
  s.epoch = h.epoch;
  s.quant = h.quant;
  s.zone = h.zone;
  s.quant_scale = h.scale;
  std::optional<Quantizer> q;
  if (s.quant != QuantKind::Float) q.emplace(s.quant, s.quant_scale);
  s.data.resize(static_cast<Eigen::Index>(h.count));
  for (Eigen::Index k = 0; k < s.data.size(); ++k) {
    const double re = read_value(is, q ? &*q : nullptr);
    const double im = read_value(is, q ? &*q : nullptr);
    s.data[k] = {re, im};
  }
  s.pps_marks = read_marks(is, h.count);
  return s;
}

}  // namespace scfo
