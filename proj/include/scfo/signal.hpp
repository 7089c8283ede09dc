#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scfo/rational.hpp"

namespace scfo {

struct Tone {
  double amplitude = 0.0;
  double freq_hz = 0.0;
  double phase_rad = 0.0;
  bool out_of_band = false;

  friend bool operator==(const Tone&, const Tone&) = default;
};

struct Band {
  double lo_hz = 0.0;
  double hi_hz = 0.0;

  bool contains(double f) const { return f >= lo_hz && f <= hi_hz; }
  friend bool operator==(const Band&, const Band&) = default;
};

struct AmplitudeDist {
  enum class Kind { LogUniform, Constant };
  Kind kind = Kind::LogUniform;
  double range_db = 20.0;
};

/// Analytic "sky" signal: a sum of sinusoids that can be evaluated at any
/// exact time. This is the ground truth every sampled stream is compared to.
class ToneBankSignal {
 public:
  ToneBankSignal() = default;
  ToneBankSignal(std::vector<Tone> tones, Band band, std::uint64_t seed = 0)
      : tones_(std::move(tones)), band_(band), seed_(seed) {}

  const std::vector<Tone>& tones() const { return tones_; }
  std::vector<Tone>& tones() { return tones_; }
  const Band& band() const { return band_; }
  std::uint64_t seed() const { return seed_; }

  double eval(const Rational& t) const;
  double eval(long double t) const;

  /// Fills `out` with samples at t0, t0 + dt, t0 + 2 dt, ...
  ///
  /// Uses per-tone phasor recursion re-anchored to the exact phase every
  /// 1024 samples, which keeps long renders fast while staying within a few
  /// 1e-13 of eval().
  void render(Eigen::Ref<Eigen::VectorXd> out, const Rational& t0, const Rational& dt) const;

  /// RMS of the continuous signal, assuming distinct tone frequencies.
  double rms() const;

  /// Union of two tone banks; the band of the left operand is kept.
  ToneBankSignal operator+(const ToneBankSignal& other) const;

  friend bool operator==(const ToneBankSignal&, const ToneBankSignal&) = default;

 private:
  std::vector<Tone> tones_;
  Band band_;
  std::uint64_t seed_ = 0;
};

/// Random broadband tone bank normalized to unit RMS.
///
/// Tone frequencies are uniform in the band, drawn one per equal-width
/// stratum so occupancy stays flat; amplitudes follow `amp_dist`; phases are
/// uniform.
ToneBankSignal synth_signal(std::uint64_t seed, int n_tones, Band band, AmplitudeDist amp_dist = {});

inline double eval(const ToneBankSignal& sig, const Rational& t) { return sig.eval(t); }

enum class InterferenceKind { SelfClockDerived, CrossClockLeak, FixedRF, AliasProbe };

/// An interference tone. Clock-tied kinds sit at `multiplier * f_a` of
/// `clock_antenna`; the fixed kinds sit at `abs_hz`.
struct InterferenceSpec {
  InterferenceKind kind = InterferenceKind::SelfClockDerived;
  std::string clock_antenna;
  Rational multiplier{1};
  Rational abs_hz{0};
  double amplitude = 1.0;
  double phase_rad = 0.0;
};

using ClockMap = std::map<std::string, RationalFreq>;

/// Exact frequency of an interference tone for the given clocks.
Rational interference_frequency(const InterferenceSpec& spec, const ClockMap& clocks);

ToneBankSignal inject(const ToneBankSignal& sig, const InterferenceSpec& spec, const ClockMap& clocks);

/// Plain-text tone list: '#' comment/metadata lines, then one
/// "amplitude frequency_hz phase_rad [oob]" line per tone.
void write_tone_bank(std::ostream& os, const ToneBankSignal& sig);
ToneBankSignal read_tone_bank(std::istream& is);

}  // namespace scfo
