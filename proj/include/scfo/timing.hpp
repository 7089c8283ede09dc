#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "scfo/rational.hpp"

namespace scfo {

/// 1PPS source: tick n is nominally at start + n seconds, displaced by
/// Gaussian jitter truncated at +/- truncate_sigma and rounded to 1 fs.
struct PpsModel {
  double jitter_ns = 0.0;
  std::uint64_t seed = 0;
  double truncate_sigma = 4.0;
  Rational start{0};
};

std::vector<Rational> pps_tick_times(const PpsModel& pps, int n_ticks);

/// Index of the sample period [k / f_a, (k + 1) / f_a) containing each tick.
std::vector<std::int64_t> pps_sample_indices(const RationalFreq& f_a, const PpsModel& pps, int n_ticks);

struct TickRecord {
  int tick = 0;
  Rational ideal;
  Rational jittered;
  std::int64_t index = 0;
  std::int64_t count = 0;  // samples since the previous tick, 0 for the first
};

std::vector<TickRecord> tick_trace(const RationalFreq& f_a, const PpsModel& pps, int n_ticks);
void write_tick_csv(std::ostream& os, const std::vector<TickRecord>& trace);

struct PpsSync {
  int chosen_phase = 0;
  std::int64_t resampled_index = 0;
  int run_length = 0;  // sub-phases that saw the pulse
};

/// Multi-phase 1PPS capture: the pulse (width_cycles clock periods wide,
/// starting at tick_time) is sampled on n_phases evenly spaced sub-phases of
/// the clock. The centre of the run of detecting sub-phases is chosen and
/// re-registered to the next phase-0 clock edge.
PpsSync synchronize_pps(const Rational& tick_time, const RationalFreq& clock, int n_phases,
                        const Rational& width_cycles = Rational{1});

struct AlignmentState {
  std::int64_t fifo_depth = 0;
  int window = 0;
  double offset_estimate = 0.0;  // mean(antenna - kapb) over the window, samples
  std::int64_t adjustment = 0;   // change applied to fifo_depth
  double residual = 0.0;         // offset left after the adjustment
};

/// Centroid alignment over the last `window` tick pairs.
AlignmentState align_fifo(const std::vector<std::int64_t>& antenna_ticks, const std::vector<std::int64_t>& kapb_ticks,
                          int window, std::int64_t fifo_depth = 0);

enum class CommutatorMode { FlyWheel, KapbReseed };

struct CommutatorTick {
  int tick = 0;
  std::int64_t output_index = 0;
  int flywheel_roll = 0;  // roll reached by free running
  int applied_roll = 0;   // roll in use after this tick under the chosen mode
  bool jumped = false;    // applied roll differs from the free-running one
};

/// Commutator roll of a k-way demultiplexed resampler (f_a -> f_c, taps N,
/// P phases) observed at each integer-second KAPB tick.
std::vector<CommutatorTick> commutator_trace(const RationalFreq& f_a, const RationalFreq& f_c, int taps, int phases,
                                             int k, int n_ticks, CommutatorMode mode);

}  // namespace scfo
