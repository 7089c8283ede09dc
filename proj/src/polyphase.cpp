#include "scfo/polyphase.hpp"

#include <cmath>
#include <cstring>

#include "scfo/detail/fir_kernel.hpp"

namespace scfo {

std::vector<SlicePhase> slice_phase_table(const PhaseAccumulator& acc, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "demux factor must be >= 1");
  std::vector<SlicePhase> out(static_cast<std::size_t>(k));
  const Rational p0 = acc.position();
  std::int64_t prev = acc.base();
  for (int j = 0; j < k; ++j) {
    const auto [base, lut] = PhaseAccumulator::quantize(p0 + acc.ratio() * Rational(j + 1), acc.phases());
    out[static_cast<std::size_t>(j)] = {base, lut, static_cast<int>(base - prev)};
    prev = base;
  }
  return out;
}

DemuxResampler::DemuxResampler(const CoefficientBank& bank, int k) : bank_(&bank), k_(k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "demux factor must be >= 1");
  if (bank.taps % k != 0)
    throw Error(ErrorCode::TapCountNotDivisible,
                std::to_string(bank.taps) + " taps are not a multiple of k = " + std::to_string(k));
}

namespace {

template <typename Sample>
std::vector<std::vector<Sample>> deinterleave(const Sample* x, std::int64_t n, int k) {
  std::vector<std::vector<Sample>> lanes(static_cast<std::size_t>(k));
  for (int l = 0; l < k; ++l) lanes[static_cast<std::size_t>(l)].reserve(static_cast<std::size_t>(n / k + 1));
  for (std::int64_t i = 0; i < n; ++i) lanes[static_cast<std::size_t>(i % k)].push_back(x[i]);
  return lanes;
}

}  // namespace

template <typename Sample, typename Acc>
void DemuxResampler::run_core(const std::vector<std::vector<Sample>>& lanes, std::int64_t n_in, const ResampleGrid& grid,
                              std::vector<Acc>& out, ResampleStats& rstats) {
  const int n = bank_->taps;
  const int k = k_;
  const std::int64_t s0 = bank_->window_offset();
  PhaseAccumulator acc(grid.ratio, bank_->phases, grid.start);

  // Slice 0 of each demuxed clock takes the current accumulator state; the
  // other slices come from the closed-form table.
  SlicePhase cur{acc.base(), acc.lut_index(), 1};
  std::int64_t prev_roll = -1;
  std::int64_t index = 0;
  bool done = false;
  // Events are indexed by the output after which the base moved by 0 or 2.
  auto record = [&](int advance) {
    if (advance == 2) {
      ++rstats.skips;
      rstats.skip_events.push_back(index - 1);
    } else if (advance == 0) {
      ++rstats.repeats;
      rstats.repeat_events.push_back(index - 1);
    }
  };
  while (!done) {
    const std::vector<SlicePhase> table = slice_phase_table(acc, k);
    for (int j = 0; j < k; ++j) {
      const SlicePhase& ph = j == 0 ? cur : table[static_cast<std::size_t>(j - 1)];
      if (j > 0) record(ph.advance);
      const std::int64_t s = ph.base + s0;
      if (s + n > n_in) {
        done = true;
        break;
      }
      // Barrel roll: tap m reads lane (roll + m) mod k at row (s + m) div k.
      const std::int64_t roll = s % k;
      if (j == 0 && prev_roll >= 0 && roll != prev_roll) ++stats_.roll_jumps;
      if (j == 0) prev_roll = roll;
      auto fetch = [&lanes, s, k](int m) {
        const std::int64_t pos = s + m;
        return lanes[static_cast<std::size_t>(pos % k)][static_cast<std::size_t>(pos / k)];
      };
      Acc y;
      if constexpr (std::is_floating_point_v<Sample>)
        y = detail::fir_dot(bank_->row(ph.lut_index), n, fetch);
      else
        y = detail::fir_dot(bank_->fixed_row(ph.lut_index), n, fetch);
      out.push_back(y);
      stats_.multiplies += n;
      ++index;
    }
    if (done) break;
    const SlicePhase& last = table.back();
    record(last.advance);
    acc.advance_by(k);
    cur = {acc.base(), acc.lut_index(), last.advance};
  }
  rstats.outputs = index;
  stats_.outputs += index;
}

ResampleResult DemuxResampler::run(const SampleStream& in, const RationalFreq& f_c, const ResampleOptions& opts) {
  if (in.size() < bank_->taps) throw Error(ErrorCode::StreamTooShort, "stream shorter than the filter");
  const ResampleGrid grid = resample_grid(*bank_, in.rate, in.epoch, f_c);
  const auto lanes = deinterleave(in.data.data(), in.size(), k_);
  std::vector<double> y;
  ResampleResult r;
  run_core(lanes, in.size(), grid, y, r.stats);
  if (y.empty()) throw Error(ErrorCode::StreamTooShort, "no complete filter window in stream");
  if (!opts.record_events) {
    r.stats.skip_events.clear();
    r.stats.repeat_events.clear();
  }
  r.out.rate = f_c;
  r.out.epoch = Rational(grid.first_tick) * f_c.period();
  r.out.zone = in.zone;
  r.out.data = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  propagate_pps(in, r.out);
  if (opts.requant.kind != QuantKind::Float) r.out = quantize(r.out, opts.requant);
  return r;
}

FixedResampleResult DemuxResampler::run_fixed(const SampleStream& in, const RationalFreq& f_c) {
  if (in.size() < bank_->taps) throw Error(ErrorCode::StreamTooShort, "stream shorter than the filter");
  if (!bank_->quantized()) throw Error(ErrorCode::InvalidArgument, "fixed-point path needs a quantized bank");
  const ResampleGrid grid = resample_grid(*bank_, in.rate, in.epoch, f_c);
  const std::vector<std::int32_t> codes = fixed_codes(in);
  const auto lanes = deinterleave(codes.data(), static_cast<std::int64_t>(codes.size()), k_);
  FixedResampleResult r;
  run_core(lanes, in.size(), grid, r.acc, r.stats);
  if (r.acc.empty()) throw Error(ErrorCode::StreamTooShort, "no complete filter window in stream");
  const double unit = 0.5 * (8.0 * in.quant_scale / 256.0) / std::ldexp(1.0, bank_->coeff_bits - 1);
  r.out.rate = f_c;
  r.out.epoch = Rational(grid.first_tick) * f_c.period();
  r.out.zone = in.zone;
  r.out.data.resize(static_cast<Eigen::Index>(r.acc.size()));
  for (std::size_t i = 0; i < r.acc.size(); ++i) r.out.data[static_cast<Eigen::Index>(i)] = static_cast<double>(r.acc[i]) * unit;
  propagate_pps(in, r.out);
  return r;
}

SampleStream demux_resample(const SampleStream& in, const RationalFreq& f_c, const CoefficientBank& bank, int k,
                            const ResampleOptions& opts) {
  DemuxResampler d(bank, k);
  return d.run(in, f_c, opts).out;
}

DemuxVerification verify_demux(const SampleStream& in, const RationalFreq& f_c, const CoefficientBank& bank, int k) {
  DemuxVerification v;
  const ResampleOptions opts{QuantizerSpec{QuantKind::Float}, false};
  const SampleStream direct = resample(in, f_c, bank, opts);
  const SampleStream demux = demux_resample(in, f_c, bank, k, opts);
  const Eigen::Index n = std::min(direct.size(), demux.size());
  v.compared = n;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::memcmp(&direct.data[i], &demux.data[i], sizeof(double)) != 0) {
      v.pass = false;
      v.first_divergence = i;
      break;
    }
  }
  if (v.pass && (direct.size() != demux.size() || !(direct.epoch == demux.epoch))) {
    v.pass = false;
    v.first_divergence = n;
  }
  if (v.pass && in.quant == QuantKind::Q8Uniform && bank.quantized()) {
    v.fixed_checked = true;
    const FixedResampleResult fd = resample_fixed(in, f_c, bank);
    DemuxResampler dm(bank, k);
    const FixedResampleResult fm = dm.run_fixed(in, f_c);
    const std::size_t m = std::min(fd.acc.size(), fm.acc.size());
    for (std::size_t i = 0; i < m; ++i) {
      if (fd.acc[i] != fm.acc[i]) {
        v.pass = false;
        v.first_divergence = static_cast<std::int64_t>(i);
        break;
      }
    }
    if (v.pass && fd.acc.size() != fm.acc.size()) {
      v.pass = false;
      v.first_divergence = static_cast<std::int64_t>(m);
    }
  }
  return v;
}

}  // namespace scfo
