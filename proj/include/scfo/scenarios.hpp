#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scfo/frontend.hpp"
#include "scfo/mixer.hpp"
#include "scfo/rational.hpp"
#include "scfo/resampler.hpp"
#include "scfo/signal.hpp"

namespace scfo {

enum class BandId { B1, B2, B3, B4, B5stream, Desk };

std::string_view to_string(BandId band);
BandId parse_band(std::string_view text);

/// Digitizer rate of each receiver band, metadata only (the desk band is the
/// simulation default of 1 MS/s).
double band_sample_rate_hz(BandId band);

struct AntennaChainSpec {
  std::string antenna_id = "ant";
  BandId band = BandId::Desk;
  RationalFreq f_nominal{Rational(1000000)};
  Rational offset_hz{0};
  Zone zone = Zone::Zone1;
  QuantizerSpec quant{};
  QuantizerSpec requant{};  // applied after resampling
  std::vector<InterferenceSpec> interference;
  double noise_rms = 0.0;
  bool extended_offset = false;  // allows |offset| up to 10 MHz

  RationalFreq f_a() const { return RationalFreq(f_nominal.hz() + offset_hz); }
};

/// Throws ConfigInvalid naming the offending field.
void validate(const AntennaChainSpec& ant);

ClockMap clock_map(const std::vector<AntennaChainSpec>& antennas);

/// Signal sampled by one antenna: the sky plus its interference tones.
ToneBankSignal antenna_signal(const ToneBankSignal& sky, const AntennaChainSpec& ant, const ClockMap& clocks);

/// Shared pieces of the sampler -> quantizer -> resampler -> mixer chain.
struct ChainSetup {
  RationalFreq f_c{Rational(1000000)};
  const CoefficientBank* bank = nullptr;  // nullptr: default_bank()
  MixerConfig mixer{};
  HilbertPair hilbert;

  explicit ChainSetup(const RationalFreq& f_c, const CoefficientBank* bank = nullptr, const MixerConfig& mixer = {});
  const CoefficientBank& coefficient_bank() const;
};

/// Runs `sig` through one antenna chain and returns at least n_out complex
/// samples on the f_c grid. Zone-2 chains are shifted by f_c - f_a.
ComplexSampleStream run_chain(const ToneBankSignal& sig, const AntennaChainSpec& ant, const ChainSetup& setup,
                              std::int64_t n_out, std::uint64_t noise_seed);

/// Final frequency (Hz, on the f_c grid) of a real RF tone after an antenna
/// chain with sample rate f_a, exact.
Rational chain_output_frequency(const Rational& rf_hz, const RationalFreq& f_a, const RationalFreq& f_c, Zone zone);

enum class LadderKind { Symmetric, Prime };

struct OffsetPlan {
  int n_antennas = 0;
  double min_pairwise_hz = 0.0;
  std::vector<Rational> assignments;

  double span_hz() const;
  double min_separation_hz() const;
  double max_abs_hz() const;
};

/// Deterministic offset ladder on the resolution grid. The range check treats
/// each antenna as occupying a min_pairwise slot: n * min <= 2 * max + resolution.
OffsetPlan plan_offsets(int n, double min_pairwise_hz, double max_abs_hz, double resolution_hz,
                        LadderKind kind = LadderKind::Symmetric);

// --- Experiments --------------------------------------------------------

struct WashoutConfig {
  RationalFreq f_c{Rational(1000000)};
  std::int64_t samples = 1000000;  // integration window
  int windows = 16;
  std::int64_t spread = 1 << 18;   // window starts are drawn from [0, spread)
  Rational multiplier{1, 4};       // self-clock tone at multiplier * f_a
  double amplitude = 0.3;
  int n_tones = 32;
  std::uint64_t seed = 1;
  Rational offset_resolution_hz{1, 1000};
  bool cross_leak = true;
};

struct WashoutPoint {
  double dwt_target = 0.0;
  double dwt = 0.0;  // achieved 2 pi delta_f_tone T after offset rounding
  Rational offset_a, offset_b;
  double delta_f_tone_hz = 0.0;
  std::vector<std::int64_t> starts;
  std::vector<double> interference_rho;  // |rho| of the clock tones per window
  std::vector<double> sky_rho;
  double envelope = 0.0;   // max interference |rho| over the windows
  double predicted = 0.0;  // 1 / dwt
  double excess_db = 0.0;  // 10 log10(envelope / predicted)
  double sky_min = 0.0;
  double cross_leak_rho = 0.0;  // antenna A's clock leaking into B, first window
};

WashoutPoint washout_point(double dwt, const WashoutConfig& cfg);

struct ScfoOffConfig {
  RationalFreq f_c{Rational(1000000)};
  std::int64_t samples = 1000000;
  Rational multiplier{1, 4};
  double amplitude = 1.0;
  double noise_rms = 0.70710678118654752;
  Zone zone = Zone::Zone1;
  Rational on_offset_hz{1000};  // offset difference for the SCFO-on comparison
  std::uint64_t seed = 1;
};

struct ScfoOffResult {
  double rho_off = 0.0;
  double predicted = 0.0;
  double rel_error = 0.0;
  double rho_on = 0.0;
  double on_bound = 0.0;  // 2 / (2 pi delta_f T) for the SCFO-on tones
};

ScfoOffResult scfo_off_control(const ScfoOffConfig& cfg);

struct Zone2ShiftConfig {
  RationalFreq f_c{Rational(1000000)};
  std::int64_t samples = 1 << 18;
  int n_tones = 12;
  std::array<Rational, 2> offsets{Rational(500), Rational(-700)};
  Rational multiplier{3, 4};
  double clock_amplitude = 2.0;
  double noise_rms = 0.0;
  std::uint64_t seed = 1;
};

struct Zone2ShiftResult {
  std::vector<double> tone_hz;      // sky tones after the chain
  std::vector<double> cross_phase;  // arg(A conj(B)) per sky tone, rad
  double delay_samples = 0.0;       // phase-slope fit
  double delay_stderr = 0.0;
  double max_abs_phase = 0.0;
  double bin_hz = 0.0;
  std::array<double, 2> clock_measured_hz{};
  std::array<double, 2> clock_expected_hz{};
  double separation_hz = 0.0;
  double expected_separation_hz = 0.0;
  double offset_difference_hz = 0.0;
};

Zone2ShiftResult zone2_shift_check(const Zone2ShiftConfig& cfg);

struct ProbeConfig {
  RationalFreq f_c{Rational(1000000)};
  std::int64_t samples = 1 << 16;
  std::array<Rational, 2> offsets{Rational(1500), Rational(-1500)};
  std::uint64_t seed = 1;
};

struct ProbeResult {
  Rational rf_hz;
  Zone zone = Zone::Zone1;
  double gain = 1.0;
  double rho = 0.0;
  double delta_hz = 0.0;  // output frequency difference between the antennas
  bool common = false;    // delta == 0: the tone is expected to correlate
  double bound = 1.0;     // |rho| bound for non-common tones
  bool straddles = false; // the tone sits in different Nyquist zones of the two antennas
};

/// Correlates a single common RF tone through two antenna chains.
ProbeResult probe_tone(Zone zone, const Rational& rf_hz, double gain, const ProbeConfig& cfg);

// --- Scenario runner ------------------------------------------------------

struct ScenarioCheck {
  std::string name;
  double value = 0.0;
  std::string target;
  bool pass = false;
};

struct ScenarioReport {
  std::string name;
  std::vector<ScenarioCheck> checks;
  std::vector<std::filesystem::path> files;
  bool passed() const;
};

struct ScenarioOptions {
  std::string config_json;              // empty: all defaults
  std::optional<std::uint64_t> seed;    // overrides the config seed
  int jobs = 0;                         // <= 0: all cores
  std::filesystem::path out_dir = ".";
};

struct ScenarioInfo {
  std::string name;
  std::string description;
};

const std::vector<ScenarioInfo>& list_scenarios();

/// Runs a named scenario, writes its CSV files and summary.txt to out_dir.
/// Throws UnknownScenario or ConfigInvalid (with the JSON path of the field).
ScenarioReport run_scenario(const std::string& name, const ScenarioOptions& opts);

}  // namespace scfo
