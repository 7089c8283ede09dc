#pragma once

#include <cstdint>
#include <vector>

#include "scfo/frontend.hpp"
#include "scfo/rational.hpp"
#include "scfo/resampler.hpp"

namespace scfo {

struct SlicePhase {
  std::int64_t base = 0;  // window base sample
  int lut_index = 0;
  int advance = 1;        // base change relative to the previous slice
};

/// The k phases one demultiplexed clock needs, computed together in closed
/// form from the accumulator state: entry j equals the state after j + 1
/// sequential steps.
std::vector<SlicePhase> slice_phase_table(const PhaseAccumulator& acc, int k);

struct DemuxStats {
  std::int64_t outputs = 0;
  std::int64_t multiplies = 0;
  std::int64_t roll_jumps = 0;  // demuxed clocks whose commutator roll moved by other than k mod k
};

/// k-lane realization of resample(): the input is split into k lanes by
/// sample index mod k, a barrel-rolling commutator feeds k slice FIRs, and k
/// outputs are produced per demultiplexed clock.
class DemuxResampler {
 public:
  DemuxResampler(const CoefficientBank& bank, int k);

  /// Float path, same output contract as resample().
  ResampleResult run(const SampleStream& in, const RationalFreq& f_c, const ResampleOptions& opts = {});
  /// Integer path, same output contract as resample_fixed().
  FixedResampleResult run_fixed(const SampleStream& in, const RationalFreq& f_c);

  const DemuxStats& stats() const { return stats_; }

 private:
  template <typename Sample, typename Acc>
  void run_core(const std::vector<std::vector<Sample>>& lanes, std::int64_t n_in, const ResampleGrid& grid,
                std::vector<Acc>& out, ResampleStats& rstats);

  const CoefficientBank* bank_;
  int k_;
  DemuxStats stats_;
};

SampleStream demux_resample(const SampleStream& in, const RationalFreq& f_c, const CoefficientBank& bank, int k,
                            const ResampleOptions& opts = {});

struct DemuxVerification {
  bool pass = true;
  std::int64_t compared = 0;
  std::int64_t first_divergence = -1;
  bool fixed_checked = false;
};

/// Runs direct and demultiplexed forms and compares them sample for sample
/// (float path always, fixed path when the input is Q8Uniform).
DemuxVerification verify_demux(const SampleStream& in, const RationalFreq& f_c, const CoefficientBank& bank, int k);

}  // namespace scfo
