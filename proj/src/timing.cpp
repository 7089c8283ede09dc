#include "scfo/timing.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "scfo/random.hpp"

namespace scfo {

std::vector<Rational> pps_tick_times(const PpsModel& pps, int n_ticks) {
  if (n_ticks < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 ticks");
  if (pps.jitter_ns < 0.0) throw Error(ErrorCode::InvalidArgument, "jitter must be >= 0");
  std::vector<Rational> t;
  t.reserve(static_cast<std::size_t>(n_ticks));
  Rng rng(pps.seed);
  const Rational fs(int128{1}, int128{1000000000000000});
  for (int i = 0; i < n_ticks; ++i) {
    Rational tick = pps.start + Rational(i);
    if (pps.jitter_ns > 0.0) {
      double g;
      do {
        g = rng.gaussian();
      } while (std::abs(g) > pps.truncate_sigma);
      const auto femto = static_cast<std::int64_t>(std::llround(g * pps.jitter_ns * 1e6));
      tick += Rational(femto) * fs;
    }
    t.push_back(tick);
  }
  return t;
}

std::vector<std::int64_t> pps_sample_indices(const RationalFreq& f_a, const PpsModel& pps, int n_ticks) {
  std::vector<std::int64_t> idx;
  for (const Rational& t : pps_tick_times(pps, n_ticks)) idx.push_back(static_cast<std::int64_t>((t * f_a.hz()).floor()));
  return idx;
}

std::vector<TickRecord> tick_trace(const RationalFreq& f_a, const PpsModel& pps, int n_ticks) {
  const std::vector<Rational> times = pps_tick_times(pps, n_ticks);
  std::vector<TickRecord> out;
  for (int i = 0; i < n_ticks; ++i) {
    TickRecord r;
    r.tick = i;
    r.ideal = pps.start + Rational(i);
    r.jittered = times[static_cast<std::size_t>(i)];
    r.index = static_cast<std::int64_t>((r.jittered * f_a.hz()).floor());
    r.count = i == 0 ? 0 : r.index - out.back().index;
    out.push_back(r);
  }
  return out;
}

void write_tick_csv(std::ostream& os, const std::vector<TickRecord>& trace) {
  os << "tick,ideal_time_s,jittered_time_s,sample_index,inter_tick_count\n";
  char buf[64];
  for (const TickRecord& r : trace) {
    std::snprintf(buf, sizeof buf, "%.15Lf", r.jittered.to_long_double());
    os << r.tick << ',' << r.ideal.str() << ',' << buf << ',' << r.index << ',' << r.count << '\n';
  }
}

PpsSync synchronize_pps(const Rational& tick_time, const RationalFreq& clock, int n_phases, const Rational& width_cycles) {
  if (n_phases < 3) throw Error(ErrorCode::InvalidArgument, "need at least 3 clock phases");
  if (clock.num() == 0) throw Error(ErrorCode::InvalidArgument, "clock must be positive");
  // Sub-phase instants are j / (f n); the pulse is high on [tick, tick + w / f).
  const Rational scale = clock.hz() * Rational(n_phases);
  const int128 j0 = (tick_time * scale).ceil();
  const int128 j_end = ((tick_time + width_cycles * clock.period()) * scale).ceil();  // exclusive
  const int128 run = j_end - j0;
  if (run < 2) throw Error(ErrorCode::PulseTooNarrow, "pulse covers fewer than 2 sub-phases");
  const int128 jc = j0 + run / 2;
  PpsSync s;
  s.run_length = static_cast<int>(run);
  int128 phase = jc % n_phases;
  if (phase < 0) phase += n_phases;
  s.chosen_phase = static_cast<int>(phase);
  s.resampled_index = static_cast<std::int64_t>(Rational(jc, n_phases).ceil());
  return s;
}

AlignmentState align_fifo(const std::vector<std::int64_t>& antenna_ticks, const std::vector<std::int64_t>& kapb_ticks,
                          int window, std::int64_t fifo_depth) {
  if (window < 2 || antenna_ticks.size() < static_cast<std::size_t>(window) ||
      kapb_ticks.size() < static_cast<std::size_t>(window))
    throw Error(ErrorCode::WindowTooShort, "centroid window needs at least 2 ticks on each list");
  const std::size_t n = std::min(antenna_ticks.size(), kapb_ticks.size());
  long double sum = 0.0L;
  for (std::size_t i = n - static_cast<std::size_t>(window); i < n; ++i)
    sum += static_cast<long double>(antenna_ticks[i] - kapb_ticks[i]);
  AlignmentState st;
  st.window = window;
  st.offset_estimate = static_cast<double>(sum / window);
  st.adjustment = std::llround(st.offset_estimate);
  st.fifo_depth = fifo_depth + st.adjustment;
  st.residual = st.offset_estimate - static_cast<double>(st.adjustment);
  return st;
}

std::vector<CommutatorTick> commutator_trace(const RationalFreq& f_a, const RationalFreq& f_c, int taps, int phases,
                                             int k, int n_ticks, CommutatorMode mode) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "demux factor must be >= 1");
  if (n_ticks < 1) throw Error(ErrorCode::InvalidArgument, "need at least 1 tick");
  const Rational ratio = f_a.hz() / f_c.hz();
  const Rational c(int128{taps - 1}, 2);
  const std::int64_t s0 = -(taps / 2);
  // Output m represents time m / f_c; the accumulator sits at m * ratio - c - s0.
  const PhaseAccumulator acc(ratio, phases, -(c + Rational(s0)));
  std::vector<CommutatorTick> out;
  for (int t = 0; t < n_ticks; ++t) {
    CommutatorTick ct;
    ct.tick = t;
    ct.output_index = static_cast<std::int64_t>((Rational(t) * f_c.hz()).ceil());
    const auto [base, lut] = PhaseAccumulator::quantize(acc.position_after(ct.output_index), phases);
    (void)lut;
    std::int64_t roll = (base + s0) % k;
    if (roll < 0) roll += k;
    ct.flywheel_roll = static_cast<int>(roll);
    // A KAPB reseed forces the roll to 0 at every tick.
    ct.applied_roll = mode == CommutatorMode::KapbReseed ? 0 : ct.flywheel_roll;
    ct.jumped = ct.applied_roll != ct.flywheel_roll;
    out.push_back(ct);
  }
  return out;
}

}  // namespace scfo
