#include "scfo/signal.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "scfo/random.hpp"

namespace scfo {

namespace {

constexpr long double kTwoPiL = 2.0L * std::numbers::pi_v<long double>;

// Phase in cycles of a tone at time t, reduced to [0, 1).
long double cycles(double freq_hz, long double t) {
  long double c = static_cast<long double>(freq_hz) * t;
  return c - std::floor(c);
}

long double cycles(double freq_hz, const Rational& t) {
  // Integer seconds contribute exactly frac(f * whole); keep that separate so
  // long runs do not lose fractional bits.
  int128 whole = t.floor();
  long double part = (t - Rational(whole)).to_long_double();
  long double f = freq_hz;
  long double a = f * static_cast<long double>(whole);
  a -= std::floor(a);
  long double b = f * part;
  b -= std::floor(b);
  long double c = a + b;
  return c - std::floor(c);
}

}  // namespace

double ToneBankSignal::eval(const Rational& t) const {
  long double acc = 0.0L;
  for (const Tone& tone : tones_)
    acc += tone.amplitude * std::sin(kTwoPiL * cycles(tone.freq_hz, t) + tone.phase_rad);
  return static_cast<double>(acc);
}

double ToneBankSignal::eval(long double t) const {
  long double acc = 0.0L;
  for (const Tone& tone : tones_)
    acc += tone.amplitude * std::sin(kTwoPiL * cycles(tone.freq_hz, t) + tone.phase_rad);
  return static_cast<double>(acc);
}

void ToneBankSignal::render(Eigen::Ref<Eigen::VectorXd> out, const Rational& t0, const Rational& dt) const {
  constexpr Eigen::Index kBlock = 1024;
  constexpr int kLanes = 4;
  out.setZero();
  const Eigen::Index n = out.size();
  for (Eigen::Index start = 0; start < n; start += kBlock) {
    const Eigen::Index len = std::min(kBlock, n - start);
    const Rational tb = t0 + dt * Rational(static_cast<std::int64_t>(start));
    for (const Tone& tone : tones_) {
      if (tone.amplitude == 0.0) continue;
      const double step = static_cast<double>(kTwoPiL * cycles(tone.freq_hz, dt));
      const double phase0 = static_cast<double>(kTwoPiL * cycles(tone.freq_hz, tb)) + tone.phase_rad;
      // Four interleaved phasors break the multiply dependency chain.
      std::complex<double> z[kLanes];
      for (int l = 0; l < kLanes; ++l) z[l] = std::polar(tone.amplitude, phase0 + l * step);
      const std::complex<double> w = std::polar(1.0, kLanes * step);
      Eigen::Index k = 0;
      for (; k + kLanes <= len; k += kLanes) {
        for (int l = 0; l < kLanes; ++l) {
          out[start + k + l] += z[l].imag();
          z[l] *= w;
        }
      }
      for (int l = 0; k < len; ++k, ++l) out[start + k] += z[l].imag();
    }
  }
}

double ToneBankSignal::rms() const {
  double p = 0.0;
  for (const Tone& t : tones_) p += 0.5 * t.amplitude * t.amplitude;
  return std::sqrt(p);
}

ToneBankSignal ToneBankSignal::operator+(const ToneBankSignal& other) const {
  ToneBankSignal r = *this;
  r.tones_.insert(r.tones_.end(), other.tones_.begin(), other.tones_.end());
  return r;
}

ToneBankSignal synth_signal(std::uint64_t seed, int n_tones, Band band, AmplitudeDist amp_dist) {
  if (band.hi_hz < band.lo_hz || band.lo_hz < 0.0)
    throw Error(ErrorCode::EmptyBand, "band [" + std::to_string(band.lo_hz) + ", " + std::to_string(band.hi_hz) + "]");
  if (n_tones < 1) throw Error(ErrorCode::InvalidArgument, "n_tones must be >= 1");

  Rng rng(seed);
  std::vector<Tone> tones(static_cast<std::size_t>(n_tones));
  const double width = (band.hi_hz - band.lo_hz) / n_tones;
  double power = 0.0;
  for (int k = 0; k < n_tones; ++k) {
    Tone& t = tones[static_cast<std::size_t>(k)];
    t.freq_hz = band.lo_hz + (k + rng.uniform()) * width;
    if (amp_dist.kind == AmplitudeDist::Kind::LogUniform)
      t.amplitude = std::pow(10.0, -rng.uniform() * amp_dist.range_db / 20.0);
    else
      t.amplitude = 1.0;
    t.phase_rad = rng.uniform(0.0, 2.0 * std::numbers::pi);
    power += 0.5 * t.amplitude * t.amplitude;
  }
  const double scale = 1.0 / std::sqrt(power);
  for (Tone& t : tones) t.amplitude *= scale;
  return ToneBankSignal(std::move(tones), band, seed);
}

Rational interference_frequency(const InterferenceSpec& spec, const ClockMap& clocks) {
  switch (spec.kind) {
    case InterferenceKind::SelfClockDerived:
    case InterferenceKind::CrossClockLeak: {
      auto it = clocks.find(spec.clock_antenna);
      if (it == clocks.end()) throw Error(ErrorCode::UnknownAntenna, "no clock for antenna '" + spec.clock_antenna + "'");
      return spec.multiplier * it->second.hz();
    }
    case InterferenceKind::FixedRF:
    case InterferenceKind::AliasProbe:
      return spec.abs_hz;
  }
  return spec.abs_hz;
}

ToneBankSignal inject(const ToneBankSignal& sig, const InterferenceSpec& spec, const ClockMap& clocks) {
  const double f = interference_frequency(spec, clocks).to_double();
  Tone tone{spec.amplitude, f, spec.phase_rad, !sig.band().contains(f)};
  if (spec.kind == InterferenceKind::AliasProbe) tone.out_of_band = true;
  ToneBankSignal out = sig;
  out.tones().push_back(tone);
  return out;
}

void write_tone_bank(std::ostream& os, const ToneBankSignal& sig) {
  char buf[128];
  os << "# scfo tone bank: amplitude frequency_hz phase_rad [oob]\n";
  std::snprintf(buf, sizeof buf, "# band %.17g %.17g\n", sig.band().lo_hz, sig.band().hi_hz);
  os << buf;
  os << "# seed " << sig.seed() << "\n";
  for (const Tone& t : sig.tones()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g", t.amplitude, t.freq_hz, t.phase_rad);
    os << buf << (t.out_of_band ? " oob\n" : "\n");
  }
}

ToneBankSignal read_tone_bank(std::istream& is) {
  std::vector<Tone> tones;
  Band band;
  std::uint64_t seed = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key;
      ls >> hash >> key;
      if (key == "band") ls >> band.lo_hz >> band.hi_hz;
      else if (key == "seed") ls >> seed;
      continue;
    }
    Tone t;
    if (!(ls >> t.amplitude >> t.freq_hz >> t.phase_rad))
      throw Error(ErrorCode::FormatError, "tone bank line " + std::to_string(lineno));
    std::string tag;
    if (ls >> tag) {
      if (tag != "oob") throw Error(ErrorCode::FormatError, "unknown tone tag '" + tag + "'");
      t.out_of_band = true;
    }
    tones.push_back(t);
  }
  return ToneBankSignal(std::move(tones), band, seed);
}

}  // namespace scfo
