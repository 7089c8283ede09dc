// scfo: command-line front end for the resampling toolkit.
//
// Exit status: 0 success, 1 domain error or failed check, 2 usage error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "scfo/hwestimate.hpp"
#include "scfo/polyphase.hpp"
#include "scfo/random.hpp"
#include "scfo/resampler.hpp"
#include "scfo/scenarios.hpp"
#include "scfo/timing.hpp"

namespace fs = std::filesystem;
using namespace scfo;

namespace {

fs::path default_out_dir() {
  const char* env = std::getenv("SCFO_OUT_DIR");
  return env && *env ? fs::path(env) : fs::path(".");
}

// Relative file names land in the output directory.
fs::path in_out_dir(const fs::path& dir, const fs::path& file) { return file.is_absolute() ? file : dir / file; }

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + p.string());
  return f;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct BankOpts {
  int taps = 56;
  int phases = 1024;
  int bits = 19;
  double beta = NAN;
  std::string window = "kaiser";
  double pass_lo = 0.0833;
  double pass_hi = 0.9167;
  double ripple_bound = 0.05;
  std::string bank_file;

  void add(CLI::App* app, bool allow_file) {
    app->add_option("--taps", taps, "filter taps N")->check(CLI::PositiveNumber);
    app->add_option("--phases", phases, "phases P (power of two)")->check(CLI::PositiveNumber);
    app->add_option("--bits", bits, "coefficient bits, 0 for floating point")->check(CLI::Range(0, 31));
    app->add_option("--beta", beta, "Kaiser beta (default: chosen for minimum delay error)");
    app->add_option("--window", window, "kaiser or rect")->check(CLI::IsMember({"kaiser", "rect"}));
    app->add_option("--pass-lo", pass_lo, "passband low edge, fraction of Nyquist");
    app->add_option("--pass-hi", pass_hi, "passband high edge, fraction of Nyquist");
    app->add_option("--ripple-bound", ripple_bound, "fail above this ripple, dB (inf disables)");
    if (allow_file) app->add_option("--bank", bank_file, "read the bank from a file instead of designing it");
  }

  CoefficientBank make() const {
    if (!bank_file.empty()) {
      std::ifstream f(bank_file);
      if (!f) throw Error(ErrorCode::InvalidArgument, "cannot read " + bank_file);
      return read_bank(f);
    }
    WindowSpec w;
    w.kind = window == "rect" ? WindowKind::Rectangular : WindowKind::Kaiser;
    w.beta = beta;
    w.ripple_bound_db = ripple_bound;
    return design_bank(taps, phases, bits, pass_lo, pass_hi, w);
  }
};

std::string bank_label(const CoefficientBank& b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "N=%d P=%d bits=%d beta=%.2f", b.taps, b.phases, b.coeff_bits, b.beta);
  return buf;
}

int cmd_design(const BankOpts& o, const fs::path& dir, const std::string& out, const std::string& resp) {
  const CoefficientBank bank = o.make();
  const fs::path bank_path = in_out_dir(dir, out);
  {
    auto f = open_out(bank_path);
    write_bank(f, bank);
  }
  const fs::path resp_path = in_out_dir(dir, resp.empty() ? bank_path.stem().string() + "_response.csv" : resp);
  {
    auto f = open_out(resp_path);
    write_response_csv(f, response(bank, bank.phases / 2 + bank.phases / 4, 512));
  }
  const BankFigures fig = analyze_bank(bank, bank.pass_lo, bank.pass_hi);
  std::printf("design %s: ripple %.4g dB, delay error pk-pk %.4g samples -> %s, %s\n", bank_label(bank).c_str(),
              fig.ripple_db, fig.delay_pkpk, bank_path.string().c_str(), resp_path.string().c_str());
  return 0;
}

int cmd_analyze(const BankOpts& o, const fs::path& dir, const std::string& out, int n_freq, int stride, double max_ripple,
                double max_delay) {
  const CoefficientBank bank = o.make();
  const fs::path p = in_out_dir(dir, out);
  auto f = open_out(p);
  f << "phase,delay,max_abs_mag_db,delay_err_pkpk\n";
  for (int ph = 0; ph < bank.phases; ph += stride) {
    const FrequencyResponse r = response(bank, ph, n_freq);
    double mmax = 0.0, dmin = INFINITY, dmax = -INFINITY;
    for (std::size_t i = 0; i < r.freq.size(); ++i) {
      if (r.freq[i] < bank.pass_lo || r.freq[i] > bank.pass_hi) continue;
      mmax = std::max(mmax, std::abs(r.mag_db[i]));
      dmin = std::min(dmin, r.delay_err[i]);
      dmax = std::max(dmax, r.delay_err[i]);
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g\n", ph, PhaseAccumulator::delay_of_index(ph, bank.phases).to_double(),
                  mmax, dmax - dmin);
    f << buf;
  }
  const BankFigures fig = analyze_bank(bank, bank.pass_lo, bank.pass_hi, n_freq, stride);
  const bool ok_r = fig.ripple_db < max_ripple, ok_d = fig.delay_pkpk < max_delay;
  std::printf("%s ripple %.4g dB (< %g)\n", ok_r ? "PASS" : "FAIL", fig.ripple_db, max_ripple);
  std::printf("%s delay error pk-pk %.4g samples (< %g)\n", ok_d ? "PASS" : "FAIL", fig.delay_pkpk, max_delay);
  std::printf("wrote %s\n", p.string().c_str());
  return ok_r && ok_d ? 0 : 1;
}

int cmd_scenario(const std::string& name, const std::string& config, std::uint64_t seed, bool seed_set, int jobs,
                 const fs::path& dir) {
  ScenarioOptions o;
  if (!config.empty()) o.config_json = read_file(config);
  if (seed_set) o.seed = seed;
  o.jobs = jobs;
  o.out_dir = dir;
  const ScenarioReport rep = run_scenario(name, o);
  for (const ScenarioCheck& c : rep.checks)
    std::printf("%s %s: %.9g (target %s)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.target.c_str());
  std::printf("%s %s -> %s\n", rep.passed() ? "PASS" : "FAIL", name.c_str(), (dir / "summary.txt").string().c_str());
  return rep.passed() ? 0 : 1;
}

int cmd_verify(const BankOpts& o, int k, const std::string& ratio, std::int64_t n, std::uint64_t seed,
               const std::string& quant) {
  const CoefficientBank bank = o.make();
  const RationalFreq f_c(Rational(1000000));
  const RationalFreq f_a(f_c.hz() * Rational::parse(ratio));
  const ToneBankSignal sig = synth_signal(seed, 32, {0.0833 * 0.5 * f_a.to_double(), 0.9167 * 0.5 * f_a.to_double()});
  SampleStream in = sample(sig, f_a, n, Zone::Zone1, Rational{}, NoiseSpec{0.1, derive_seed(seed, 1)});
  if (quant == "q8") in = quantize(in, {QuantKind::Q8Uniform});
  const DemuxVerification v = verify_demux(in, f_c, bank, k);
  std::printf("%s demux k=%d %s ratio %s: %lld outputs compared%s", v.pass ? "PASS" : "FAIL", k,
              bank_label(bank).c_str(), ratio.c_str(), static_cast<long long>(v.compared),
              v.fixed_checked ? " (float and fixed paths)" : "");
  if (!v.pass) std::printf(", first divergence at %lld", static_cast<long long>(v.first_divergence));
  std::printf("\n");
  return v.pass ? 0 : 1;
}

int cmd_estimate(const HwConfig& c, const std::string& device) {
  DeviceTable dev;
  if (!device.empty()) {
    std::ifstream f(device);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot read " + device);
    dev = read_device_table(f);
  }
  const HwEstimate e = estimate(c, dev);
  std::printf("multipliers %lld (FIR %lld + mixer %lld)\n", static_cast<long long>(e.multipliers),
              static_cast<long long>(e.fir_mults), static_cast<long long>(e.mixer_mults));
  std::printf("memory blocks %lld (coefficients %lld + mixer LUTs %lld)\n", static_cast<long long>(e.mem_blocks),
              static_cast<long long>(e.coeff_mems), static_cast<long long>(e.mixer_mems));
  std::printf("logic elements %lld (adders %lld + shift registers %lld + other %lld)\n", static_cast<long long>(e.les),
              static_cast<long long>(e.adder_les), static_cast<long long>(e.shift_reg_les),
              static_cast<long long>(e.misc_les));
  std::printf("utilization on %s: %.1f%% multipliers, %.1f%% memory, %.1f%% logic\n", dev.name.c_str(),
              100 * e.util_mult, 100 * e.util_mem, 100 * e.util_les);
  std::printf("FIR clock %.6g Hz, %.6g multiplies/s\n", e.fir_clock_hz, e.mult_ops_per_s);
  std::printf("%s\n", kPowerCitation);
  return 0;
}

int cmd_timing(const std::string& fa, int ticks, double jitter, std::uint64_t seed, const fs::path& dir,
               const std::string& out, int phases, int k, const std::string& mode) {
  const RationalFreq f_a = RationalFreq::parse(fa);
  PpsModel pps;
  pps.jitter_ns = jitter;
  pps.seed = seed;
  const std::vector<TickRecord> tr = tick_trace(f_a, pps, ticks);
  const fs::path p = in_out_dir(dir, out);
  {
    auto f = open_out(p);
    write_tick_csv(f, tr);
  }
  std::int64_t lo = INT64_MAX, hi = INT64_MIN;
  for (std::size_t i = 1; i < tr.size(); ++i) {
    lo = std::min(lo, tr[i].count);
    hi = std::max(hi, tr[i].count);
  }
  const long double mean =
      static_cast<long double>(tr.back().index - tr.front().index) / static_cast<long double>(tr.size() - 1);
  std::printf("f_a %s Hz: inter-tick counts in [%lld, %lld], mean %.6Lf\n", f_a.str().c_str(), static_cast<long long>(lo),
              static_cast<long long>(hi), mean);

  PpsModel ideal;
  const std::vector<std::int64_t> kapb = pps_sample_indices(RationalFreq(Rational(100000000)), ideal, ticks);
  bool exact = true;
  for (std::size_t i = 1; i < kapb.size(); ++i) exact = exact && kapb[i] - kapb[i - 1] == 100000000;
  std::printf("%s KAPB 100 MHz: %s cycles between ticks\n", exact ? "PASS" : "FAIL", exact ? "exactly 1e8" : "not 1e8");

  const std::vector<Rational> times = pps_tick_times(pps, ticks);
  int run_min = INT32_MAX;
  for (const Rational& t : times) run_min = std::min(run_min, synchronize_pps(t, f_a, phases).run_length);
  std::printf("synchronizer: %d phases, shortest detection run %d\n", phases, run_min);

  const auto trace = commutator_trace(f_a, RationalFreq(Rational(100000000) * Rational(30)), 56, 1024, k, std::min(ticks, 8),
                                      mode == "reseed" ? CommutatorMode::KapbReseed : CommutatorMode::FlyWheel);
  int jumps = 0;
  for (const auto& c : trace) jumps += c.jumped ? 1 : 0;
  std::printf("commutator k=%d (%s): %d of %zu KAPB ticks would move the roll\n", k, mode.c_str(), jumps, trace.size());
  std::printf("wrote %s\n", p.string().c_str());
  return exact ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sample-clock-offset resampling toolkit"};
  app.require_subcommand(1);
  std::string out_dir = default_out_dir().string();
  std::uint64_t seed = 1;
  int jobs = 0;

  BankOpts design_o;
  std::string design_out = "bank.txt", design_resp;
  auto* design = app.add_subcommand("design-filter", "design a resampling coefficient bank");
  design_o.add(design, false);
  design->add_option("--out", design_out, "bank file (relative paths go under --out-dir)");
  design->add_option("--response", design_resp, "response CSV for one phase");
  design->add_option("--out-dir", out_dir, "output directory (default $SCFO_OUT_DIR or .)");

  BankOpts an_o;
  std::string an_out = "response_by_phase.csv";
  int an_nfreq = 128, an_stride = 1;
  double an_ripple = 0.05, an_delay = 1e-3;
  auto* analyze = app.add_subcommand("analyze-response", "per-phase magnitude and delay-error figures");
  an_o.add(analyze, true);
  analyze->add_option("--out", an_out, "CSV file");
  analyze->add_option("--n-freq", an_nfreq, "frequency points")->check(CLI::Range(2, 1 << 16));
  analyze->add_option("--phase-stride", an_stride, "analyze every n-th phase")->check(CLI::PositiveNumber);
  analyze->add_option("--max-ripple-db", an_ripple, "ripple limit for the PASS line");
  analyze->add_option("--max-delay", an_delay, "delay-error pk-pk limit for the PASS line");
  analyze->add_option("--out-dir", out_dir, "output directory");

  std::string sc_name, sc_config;
  auto* scen = app.add_subcommand("run-scenario", "run a named experiment and write CSV + summary.txt");
  scen->add_option("name", sc_name, "scenario name (see list-scenarios)")->required();
  scen->add_option("--config", sc_config, "JSON config file")->check(CLI::ExistingFile);
  auto* sc_seed = scen->add_option("--seed", seed, "random seed (overrides the config)");
  scen->add_option("--jobs", jobs, "worker threads, 0 = all cores");
  scen->add_option("--out", out_dir, "output directory (default $SCFO_OUT_DIR or .)");

  BankOpts vd_o;
  int vd_k = 8;
  std::string vd_ratio = "1001/1000", vd_quant = "q8";
  std::int64_t vd_n = 100000;
  auto* verify = app.add_subcommand("verify-demux", "check the k-way demultiplexed resampler against the direct one");
  vd_o.add(verify, true);
  verify->add_option("--k", vd_k, "demultiplex factor")->check(CLI::PositiveNumber);
  verify->add_option("--ratio", vd_ratio, "f_a / f_c as num/den or decimal");
  verify->add_option("--samples", vd_n, "input samples")->check(CLI::PositiveNumber);
  verify->add_option("--quant", vd_quant, "input quantization")->check(CLI::IsMember({"q8", "float"}));
  verify->add_option("--seed", seed, "random seed");

  HwConfig hw;
  std::string hw_device;
  bool hw_unshared = false;
  auto* est = app.add_subcommand("estimate-resources", "multiplier, memory-block and logic estimate");
  est->add_option("--taps", hw.taps, "FIR taps")->check(CLI::PositiveNumber);
  est->add_option("--k", hw.demux, "demultiplex factor")->check(CLI::PositiveNumber);
  est->add_option("--streams", hw.streams, "sample streams")->check(CLI::NonNegativeNumber);
  est->add_flag("--complex,!--real", hw.complex_output, "complex output (default) or real");
  est->add_flag("--unshared", hw_unshared, "separate coefficient LUTs for the two FIRs of a complex output");
  est->add_option("--sample-bits", hw.sample_bits, "shift-register word width");
  est->add_option("--coeff-entries", hw.coeff_lut_entries, "coefficient LUT entries");
  est->add_option("--mixer-mults", hw.mixer_mults_per_stream, "mixer multipliers per stream (-1: 2k complex, k real)");
  est->add_option("--adders", hw.adders_per_fir, "adders per FIR (-1: one per tap)");
  est->add_option("--adder-bits", hw.adder_avg_bits, "average adder width");
  est->add_option("--pipeline-factor", hw.pipeline_factor, "LE multiplier for pipelining");
  est->add_option("--misc-les", hw.misc_les, "other logic, LEs");
  est->add_option("--rate", hw.sample_rate_hz, "per-stream sample rate, Hz");
  est->add_option("--device", hw_device, "device table file")->check(CLI::ExistingFile);

  std::string tm_fa = "3000000000.1", tm_out = "ticks.csv", tm_mode = "flywheel";
  int tm_ticks = 20, tm_phases = 8, tm_k = 8;
  double tm_jitter = 2.0;
  auto* timing = app.add_subcommand("timing-sim", "1PPS sample counting, synchronizer and commutator trace");
  timing->add_option("--fa", tm_fa, "antenna sample clock, exact decimal or num/den");
  timing->add_option("--ticks", tm_ticks, "PPS ticks")->check(CLI::Range(2, 100000));
  timing->add_option("--jitter-ns", tm_jitter, "PPS jitter sigma, ns")->check(CLI::NonNegativeNumber);
  timing->add_option("--phases", tm_phases, "synchronizer clock phases")->check(CLI::Range(3, 1024));
  timing->add_option("--k", tm_k, "commutator demultiplex factor")->check(CLI::PositiveNumber);
  timing->add_option("--commutator", tm_mode, "flywheel or reseed")->check(CLI::IsMember({"flywheel", "reseed"}));
  timing->add_option("--seed", seed, "random seed");
  timing->add_option("--out", tm_out, "tick CSV");
  timing->add_option("--out-dir", out_dir, "output directory");

  auto* list = app.add_subcommand("list-scenarios", "list the named experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const fs::path dir(out_dir);
    if (*design) return cmd_design(design_o, dir, design_out, design_resp);
    if (*analyze) return cmd_analyze(an_o, dir, an_out, an_nfreq, an_stride, an_ripple, an_delay);
    if (*scen) return cmd_scenario(sc_name, sc_config, seed, sc_seed->count() > 0, jobs, dir);
    if (*verify) return cmd_verify(vd_o, vd_k, vd_ratio, vd_n, seed, vd_quant);
    if (*est) {
      hw.share_coeff_luts = !hw_unshared;
      return cmd_estimate(hw, hw_device);
    }
    if (*timing) return cmd_timing(tm_fa, tm_ticks, tm_jitter, seed, dir, tm_out, tm_phases, tm_k, tm_mode);
    if (*list) {
      for (const ScenarioInfo& s : list_scenarios()) std::printf("%-22s %s\n", s.name.c_str(), s.description.c_str());
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == ErrorCode::UnknownScenario ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
